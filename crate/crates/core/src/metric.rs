//! Metric spaces, triangle defects and Kuratowski embeddings.

use std::fmt;
use std::io::Read;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point given by its coordinates. Points of an embedded space carry a
/// single coordinate holding their index in the distance matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn xy(x: f64, y: f64) -> Self {
        Point(vec![x, y])
    }

    pub fn xyz(x: f64, y: f64, z: f64) -> Self {
        Point(vec![x, y, z])
    }

    pub fn index(i: usize) -> Self {
        Point(vec![i as f64])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// Dense symmetric distance matrix over a finite set of labelled points.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    labels: Vec<String>,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Validates symmetry, a zero diagonal and non-negativity.
    pub fn new(labels: Vec<String>, data: Vec<f64>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidMatrix("empty matrix".into()));
        }
        if data.len() != n * n {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries, found {}",
                n * n,
                data.len()
            )));
        }
        for i in 0..n {
            if data[i * n + i] != 0.0 {
                return Err(Error::InvalidMatrix(format!("non-zero diagonal at {i}")));
            }
            for j in 0..n {
                let a = data[i * n + j];
                if !a.is_finite() || a < 0.0 {
                    return Err(Error::InvalidMatrix(format!("bad entry at ({i}, {j})")));
                }
                let b = data[j * n + i];
                if (a - b).abs() > 1e-12 * a.max(b).max(1.0) {
                    return Err(Error::InvalidMatrix(format!("asymmetric at ({i}, {j})")));
                }
            }
        }
        Ok(DistanceMatrix { labels, data })
    }

    /// Reads a CSV file whose header row holds the point labels (the first
    /// header cell is ignored) and whose rows are `label, d_1, ..., d_n`.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let header = rdr.headers()?.clone();
        let labels: Vec<String> = header.iter().skip(1).map(|s| s.trim().to_string()).collect();
        let n = labels.len();
        let mut data = Vec::with_capacity(n * n);
        let mut rows = 0;
        for rec in rdr.records() {
            let rec = rec?;
            if rec.len() != n + 1 {
                return Err(Error::InvalidMatrix(format!("row {rows} has {} cells", rec.len())));
            }
            for cell in rec.iter().skip(1) {
                let v: f64 = cell
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidMatrix(format!("unparsable entry '{cell}'")))?;
                data.push(v);
            }
            rows += 1;
        }
        if rows != n {
            return Err(Error::InvalidMatrix(format!("{n} labels but {rows} rows")));
        }
        DistanceMatrix::new(labels, data)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.labels.len() + j]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpaceKind {
    Euclidean { dim: usize },
    Lp { dim: usize, p: f64 },
    L1 { dim: usize },
    Linf { dim: usize },
    /// First Heisenberg group with the Korányi gauge.
    Heisenberg,
    Embedded(Arc<DistanceMatrix>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricSpace {
    kind: SpaceKind,
}

impl MetricSpace {
    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::check_dim(dim)?;
        Ok(MetricSpace { kind: SpaceKind::Euclidean { dim } })
    }

    pub fn lp(dim: usize, p: f64) -> Result<Self> {
        Self::check_dim(dim)?;
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::InvalidSpace(format!("lp exponent must lie in (1, inf), got {p}")));
        }
        Ok(MetricSpace { kind: SpaceKind::Lp { dim, p } })
    }

    pub fn l1(dim: usize) -> Result<Self> {
        Self::check_dim(dim)?;
        Ok(MetricSpace { kind: SpaceKind::L1 { dim } })
    }

    pub fn linf(dim: usize) -> Result<Self> {
        Self::check_dim(dim)?;
        Ok(MetricSpace { kind: SpaceKind::Linf { dim } })
    }

    pub fn heisenberg() -> Self {
        MetricSpace { kind: SpaceKind::Heisenberg }
    }

    pub fn embedded(matrix: DistanceMatrix) -> Self {
        MetricSpace { kind: SpaceKind::Embedded(Arc::new(matrix)) }
    }

    fn check_dim(dim: usize) -> Result<()> {
        if dim == 0 {
            return Err(Error::InvalidSpace("dimension must be positive".into()));
        }
        Ok(())
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            SpaceKind::Euclidean { dim }
            | SpaceKind::Lp { dim, .. }
            | SpaceKind::L1 { dim }
            | SpaceKind::Linf { dim } => *dim,
            SpaceKind::Heisenberg => 3,
            SpaceKind::Embedded(_) => 1,
        }
    }

    /// Exponent of the norm for the normed-space kinds.
    pub fn exponent(&self) -> Option<f64> {
        match &self.kind {
            SpaceKind::Euclidean { .. } => Some(2.0),
            SpaceKind::Lp { p, .. } => Some(*p),
            SpaceKind::L1 { .. } => Some(1.0),
            SpaceKind::Linf { .. } => Some(f64::INFINITY),
            _ => None,
        }
    }

    pub fn is_normed(&self) -> bool {
        self.exponent().is_some()
    }

    pub fn check_point(&self, p: &Point) -> Result<()> {
        if p.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: p.dim() });
        }
        if p.0.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        if let SpaceKind::Embedded(m) = &self.kind {
            let c = p.0[0];
            if c < 0.0 || c.fract() != 0.0 || c as usize >= m.len() {
                return Err(Error::InvalidParameter(format!("no point with index {c}")));
            }
        }
        Ok(())
    }

    /// Checked distance.
    pub fn distance(&self, a: &Point, b: &Point) -> Result<f64> {
        self.check_point(a)?;
        self.check_point(b)?;
        Ok(self.dist(a, b))
    }

    /// Unchecked distance; callers guarantee matching dimensions.
    #[inline]
    pub fn dist(&self, a: &Point, b: &Point) -> f64 {
        self.dist_slices(&a.0, &b.0)
    }

    #[inline]
    pub fn dist_slices(&self, a: &[f64], b: &[f64]) -> f64 {
        match &self.kind {
            SpaceKind::Euclidean { .. } => {
                a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
            }
            SpaceKind::L1 { .. } => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
            SpaceKind::Linf { .. } => a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs())),
            SpaceKind::Lp { p, .. } => lp_norm(a.iter().zip(b).map(|(x, y)| x - y), *p),
            SpaceKind::Heisenberg => heisenberg::distance(
                &[a[0], a[1], a[2]],
                &[b[0], b[1], b[2]],
            ),
            SpaceKind::Embedded(m) => m.get(a[0] as usize, b[0] as usize),
        }
    }

    /// Norm of a vector, for normed kinds.
    pub fn norm(&self, v: &[f64]) -> Option<f64> {
        let p = self.exponent()?;
        Some(if p == f64::INFINITY {
            v.iter().fold(0.0, |m, x| m.max(x.abs()))
        } else if p == 1.0 {
            v.iter().map(|x| x.abs()).sum()
        } else if p == 2.0 {
            v.iter().map(|x| x * x).sum::<f64>().sqrt()
        } else {
            lp_norm(v.iter().copied(), p)
        })
    }
}

/// Scaled p-norm that avoids overflow for large coordinates.
pub fn lp_norm(v: impl Iterator<Item = f64> + Clone, p: f64) -> f64 {
    let m = v.clone().fold(0.0f64, |m, x| m.max(x.abs()));
    if m == 0.0 {
        return 0.0;
    }
    m * v.map(|x| (x.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
}

impl fmt::Display for MetricSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SpaceKind::Euclidean { dim } => write!(f, "euclidean({dim})"),
            SpaceKind::Lp { dim, p } => write!(f, "lp({dim},{p})"),
            SpaceKind::L1 { dim } => write!(f, "l1({dim})"),
            SpaceKind::Linf { dim } => write!(f, "linf({dim})"),
            SpaceKind::Heisenberg => write!(f, "heisenberg"),
            SpaceKind::Embedded(m) => write!(f, "embedded({})", m.len()),
        }
    }
}

impl FromStr for MetricSpace {
    type Err = Error;

    /// Parses `euclidean(2)`, `lp(2,3)`, `l1(2)`, `linf(3)` or `heisenberg`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s == "heisenberg" {
            return Ok(MetricSpace::heisenberg());
        }
        let bad = || Error::InvalidSpace(format!("cannot parse space '{s}'"));
        let open = s.find('(').ok_or_else(bad)?;
        if !s.ends_with(')') {
            return Err(bad());
        }
        let name = &s[..open];
        let args: Vec<&str> = s[open + 1..s.len() - 1].split(',').map(str::trim).collect();
        let dim: usize = args[0].parse().map_err(|_| bad())?;
        match (name, args.len()) {
            ("euclidean", 1) | ("l2", 1) => MetricSpace::euclidean(dim),
            ("l1", 1) => MetricSpace::l1(dim),
            ("linf", 1) => MetricSpace::linf(dim),
            ("lp", 2) => {
                let p: f64 = args[1].parse().map_err(|_| bad())?;
                if p == 2.0 {
                    MetricSpace::euclidean(dim)
                } else {
                    MetricSpace::lp(dim, p)
                }
            }
            _ => Err(bad()),
        }
    }
}

/// Group operations and the Korányi gauge on the first Heisenberg group.
pub mod heisenberg {
    pub type H = [f64; 3];

    #[inline]
    pub fn mul(a: &H, b: &H) -> H {
        [a[0] + b[0], a[1] + b[1], a[2] + b[2] + 0.5 * (a[0] * b[1] - a[1] * b[0])]
    }

    #[inline]
    pub fn inv(a: &H) -> H {
        [-a[0], -a[1], -a[2]]
    }

    #[inline]
    pub fn gauge(a: &H) -> f64 {
        let r2 = a[0] * a[0] + a[1] * a[1];
        (r2 * r2 + a[2] * a[2]).sqrt().sqrt()
    }

    /// Left-invariant distance `|a^{-1} b|`.
    #[inline]
    pub fn distance(a: &H, b: &H) -> f64 {
        gauge(&mul(&inv(a), b))
    }

    /// Dilation by `lambda`.
    pub fn dilate(a: &H, lambda: f64) -> H {
        [lambda * a[0], lambda * a[1], lambda * lambda * a[2]]
    }
}

/// Ordered defect `d(x,y) + d(y,z) - d(x,z)` from the three distances.
#[inline]
pub fn ordered_defect(dxy: f64, dyz: f64, dxz: f64) -> f64 {
    dxy + dyz - dxz
}

/// Symmetric defect: the least ordered defect over all permutations, which
/// equals `(a + b) - c` for the sorted distances `a <= b <= c`.
#[inline]
pub fn symmetric_defect(d1: f64, d2: f64, d3: f64) -> f64 {
    let lo = d1.min(d2);
    let hi = d1.max(d2);
    let c = hi.max(d3);
    let b = lo.max(hi.min(d3));
    let a = lo.min(d3);
    ((a + b) - c).max(0.0)
}

pub fn triangle_defect_ordered(space: &MetricSpace, x: &Point, y: &Point, z: &Point) -> Result<f64> {
    Ok(ordered_defect(space.distance(x, y)?, space.distance(y, z)?, space.distance(x, z)?))
}

pub fn triangle_defect(space: &MetricSpace, x: &Point, y: &Point, z: &Point) -> Result<f64> {
    Ok(symmetric_defect(space.distance(x, y)?, space.distance(y, z)?, space.distance(x, z)?))
}

/// Embeds `universe` into `linf(|reference|)` via `x -> (d(x, r_j))_j`.
///
/// The map is isometric on the reference set and 1-Lipschitz everywhere.
/// Every reference point must belong to the universe.
pub fn kuratowski_embed(
    space: &MetricSpace,
    universe: &[Point],
    reference: &[Point],
) -> Result<(MetricSpace, Vec<Point>)> {
    if reference.is_empty() {
        return Err(Error::InvalidParameter("empty reference set".into()));
    }
    for r in reference {
        space.check_point(r)?;
        if !universe.iter().any(|u| u == r) {
            return Err(Error::InvalidParameter("reference point outside the universe".into()));
        }
    }
    for u in universe {
        space.check_point(u)?;
    }
    let target = MetricSpace::linf(reference.len())?;
    let image = universe
        .iter()
        .map(|u| Point(reference.iter().map(|r| space.dist(u, r)).collect()))
        .collect();
    Ok((target, image))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_distances() {
        let e = MetricSpace::euclidean(2).unwrap();
        let a = Point::xy(0.0, 0.0);
        let b = Point::xy(3.0, 4.0);
        assert_eq!(e.distance(&a, &b).unwrap(), 5.0);
        assert_eq!(MetricSpace::l1(2).unwrap().distance(&a, &b).unwrap(), 7.0);
        assert_eq!(MetricSpace::linf(2).unwrap().distance(&a, &b).unwrap(), 4.0);
    }

    #[test]
    fn koranyi_vertical_axis() {
        let h = MetricSpace::heisenberg();
        let d = h.distance(&Point::xyz(0.0, 0.0, 0.0), &Point::xyz(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(d, 1.0);
        let d = h.distance(&Point::xyz(0.0, 0.0, 0.0), &Point::xyz(1.0, 0.0, 0.0)).unwrap();
        assert_eq!(d, 1.0);
    }

    #[test]
    fn collinear_defect_vanishes() {
        let e = MetricSpace::euclidean(2).unwrap();
        let v = triangle_defect(&e, &Point::xy(0.0, 0.0), &Point::xy(1.0, 0.0), &Point::xy(2.0, 0.0));
        assert_eq!(v.unwrap(), 0.0);
    }

    #[test]
    fn equilateral_defect_is_one() {
        let e = MetricSpace::euclidean(2).unwrap();
        let h = 3f64.sqrt() / 2.0;
        let v = triangle_defect(&e, &Point::xy(0.0, 0.0), &Point::xy(1.0, 0.0), &Point::xy(0.5, h))
            .unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let e = MetricSpace::euclidean(2).unwrap();
        assert!(matches!(
            e.distance(&Point::xy(0.0, 0.0), &Point::xyz(0.0, 0.0, 0.0)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert_eq!(e.distance(&Point::xy(f64::NAN, 0.0), &Point::xy(0.0, 0.0)), Err(Error::NonFinite));
        assert!(MetricSpace::lp(2, 0.5).is_err());
        assert!(MetricSpace::lp(2, 1.0).is_err());
    }

    #[test]
    fn matrix_validation() {
        let labels = vec!["a".to_string(), "b".to_string()];
        assert!(DistanceMatrix::new(labels.clone(), vec![0.0, 1.0, 2.0, 0.0]).is_err());
        assert!(DistanceMatrix::new(labels.clone(), vec![0.0, -1.0, -1.0, 0.0]).is_err());
        assert!(DistanceMatrix::new(labels, vec![0.0, 1.0, 1.0, 0.0]).is_ok());
        let csv = "id,a,b,c\na,0,1,2\nb,1,0,1\nc,2,1,0\n";
        let m = DistanceMatrix::from_csv(csv.as_bytes()).unwrap();
        assert_eq!(m.get(0, 2), 2.0);
        let s = MetricSpace::embedded(m);
        assert_eq!(s.distance(&Point::index(2), &Point::index(1)).unwrap(), 1.0);
        assert!(s.distance(&Point::index(3), &Point::index(1)).is_err());
    }

    #[test]
    fn parse_round_trip() {
        for s in ["euclidean(2)", "lp(3,4)", "l1(2)", "linf(5)", "heisenberg"] {
            let m: MetricSpace = s.parse().unwrap();
            assert_eq!(m.to_string(), s);
        }
        assert!("lp(2,0.5)".parse::<MetricSpace>().is_err());
    }

    #[test]
    fn embedding_is_isometric_on_reference() {
        let e = MetricSpace::euclidean(2).unwrap();
        let pts: Vec<Point> = (0..6).map(|i| Point::xy(i as f64, (i * i) as f64 * 0.1)).collect();
        let (t, img) = kuratowski_embed(&e, &pts, &pts[1..4]).unwrap();
        assert_eq!(t.dim(), 3);
        for i in 1..4 {
            for j in 1..4 {
                assert!((t.dist(&img[i], &img[j]) - e.dist(&pts[i], &pts[j])).abs() < 1e-12);
            }
        }
        assert!(kuratowski_embed(&e, &pts, &[]).is_err());
        assert!(kuratowski_embed(&e, &pts, &[Point::xy(9.0, 9.0)]).is_err());
    }
}
