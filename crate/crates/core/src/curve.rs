//! Piecewise-linear curves, their loop parametrisation and sampling.
//!
//! Every curve is stored as a closed loop parametrised by arc length on
//! `[0, L)`. Open polylines are traversed out and back, so each image point
//! is visited twice and `L` is twice the length of the image.

use std::f64::consts::PI;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{heisenberg, MetricSpace, Point, SpaceKind};

/// Generator description for the built-in curve families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CurveSpec {
    Circle { radius: f64, nverts: usize },
    Segment { length: f64 },
    Koch { angle_deg: f64, depth: u32 },
    Ell1Zigzag { n: u32 },
    Spiral { turns: f64, nverts: usize },
    Polygon { vertices: Vec<Vec<f64>>, closed: bool },
    HeisenbergLift { planar: Box<CurveSpec>, steps: usize },
}

impl CurveSpec {
    pub fn circle(radius: f64, nverts: usize) -> Self {
        CurveSpec::Circle { radius, nverts }
    }

    pub fn koch(angle_deg: f64, depth: u32) -> Self {
        CurveSpec::Koch { angle_deg, depth }
    }

    pub fn zigzag(n: u32) -> Self {
        CurveSpec::Ell1Zigzag { n }
    }

    pub fn lift(planar: CurveSpec, steps: usize) -> Self {
        CurveSpec::HeisenbergLift { planar: Box::new(planar), steps }
    }

    /// Space the family lives in unless overridden.
    pub fn default_space(&self) -> MetricSpace {
        match self {
            CurveSpec::Ell1Zigzag { .. } => MetricSpace::l1(2).expect("valid"),
            CurveSpec::HeisenbergLift { .. } => MetricSpace::heisenberg(),
            CurveSpec::Polygon { vertices, .. } => {
                let d = vertices.first().map_or(2, |v| v.len().max(1));
                MetricSpace::euclidean(d).expect("valid")
            }
            _ => MetricSpace::euclidean(2).expect("valid"),
        }
    }

    /// Short human-readable label.
    pub fn label(&self) -> String {
        match self {
            CurveSpec::Circle { radius, nverts } => format!("circle(r={radius},n={nverts})"),
            CurveSpec::Segment { length } => format!("segment({length})"),
            CurveSpec::Koch { angle_deg, depth } => format!("koch({angle_deg},{depth})"),
            CurveSpec::Ell1Zigzag { n } => format!("ell1_zigzag({n})"),
            CurveSpec::Spiral { turns, nverts } => format!("spiral({turns},{nverts})"),
            CurveSpec::Polygon { vertices, closed } => {
                format!("polygon({},{})", vertices.len(), if *closed { "closed" } else { "open" })
            }
            CurveSpec::HeisenbergLift { planar, steps } => {
                format!("lift({},{steps})", planar.label())
            }
        }
    }

    /// Planar vertex list and closedness for the planar families.
    fn planar_vertices(&self) -> Result<(Vec<Point>, bool)> {
        match self {
            CurveSpec::Circle { radius, nverts } => {
                if !(radius.is_finite() && *radius > 0.0) || *nverts < 3 {
                    return Err(Error::InvalidCurve("circle needs radius > 0 and >= 3 vertices".into()));
                }
                let v = (0..*nverts)
                    .map(|k| {
                        let a = 2.0 * PI * k as f64 / *nverts as f64;
                        Point::xy(radius * a.cos(), radius * a.sin())
                    })
                    .collect();
                Ok((v, true))
            }
            CurveSpec::Segment { length } => {
                if !(length.is_finite() && *length > 0.0) {
                    return Err(Error::InvalidCurve("segment needs positive length".into()));
                }
                Ok((vec![Point::xy(0.0, 0.0), Point::xy(*length, 0.0)], false))
            }
            CurveSpec::Koch { angle_deg, depth } => {
                if !(angle_deg.is_finite() && *angle_deg > 0.0 && *angle_deg < 60.0) {
                    return Err(Error::InvalidCurve(format!(
                        "koch angle must lie in (0, 60) degrees, got {angle_deg}"
                    )));
                }
                if *depth > 10 {
                    return Err(Error::InvalidCurve("koch depth above 10".into()));
                }
                Ok((koch_vertices(angle_deg.to_radians(), *depth), false))
            }
            CurveSpec::Ell1Zigzag { n } => {
                if *n > 20 {
                    return Err(Error::InvalidCurve("zigzag order above 20".into()));
                }
                let k = 1usize << n;
                let h = 1.0 / k as f64;
                let v = (0..=k)
                    .map(|i| Point::xy(i as f64 * h, if i % 2 == 1 { h } else { 0.0 }))
                    .collect();
                Ok((v, false))
            }
            CurveSpec::Spiral { turns, nverts } => {
                if !(turns.is_finite() && *turns > 0.0) || *nverts < 2 {
                    return Err(Error::InvalidCurve("spiral needs turns > 0 and >= 2 vertices".into()));
                }
                let total = 2.0 * PI * turns;
                let v = (0..*nverts)
                    .map(|k| {
                        let s = k as f64 / (*nverts - 1) as f64;
                        let a = s * total;
                        let r = 0.2 + 0.8 * s;
                        Point::xy(r * a.cos(), r * a.sin())
                    })
                    .collect();
                Ok((v, false))
            }
            CurveSpec::Polygon { vertices, closed } => {
                Ok((vertices.iter().map(|v| Point(v.clone())).collect(), *closed))
            }
            CurveSpec::HeisenbergLift { .. } => {
                Err(Error::InvalidCurve("a lift is not a planar curve".into()))
            }
        }
    }
}

fn koch_vertices(theta: f64, depth: u32) -> Vec<Point> {
    let mut pts = vec![[0.0f64, 0.0], [1.0, 0.0]];
    let l = 1.0 / (2.0 * (1.0 + theta.cos()));
    for _ in 0..depth {
        let mut next = Vec::with_capacity(pts.len() * 4);
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let d = [b[0] - a[0], b[1] - a[1]];
            // Rotate the direction by theta for the rising edge of the bump.
            let (s, c) = theta.sin_cos();
            let up = [c * d[0] - s * d[1], s * d[0] + c * d[1]];
            let p1 = [a[0] + l * d[0], a[1] + l * d[1]];
            let p2 = [p1[0] + l * up[0], p1[1] + l * up[1]];
            let p3 = [b[0] - l * d[0], b[1] - l * d[1]];
            next.extend_from_slice(&[a, p1, p2, p3]);
        }
        next.push(*pts.last().unwrap());
        pts = next;
    }
    pts.into_iter().map(|p| Point::xy(p[0], p[1])).collect()
}

/// Lifts a planar polyline to the Heisenberg group. The planar curve is
/// resampled at `steps` equal arc-length steps and each step becomes an exact
/// horizontal segment via group multiplication.
fn horizontal_lift(planar: &[Point], planar_closed: bool, steps: usize) -> Result<Vec<Point>> {
    if steps < 2 {
        return Err(Error::InvalidCurve("lift needs at least 2 steps".into()));
    }
    if planar.iter().any(|p| p.dim() != 2) {
        return Err(Error::InvalidCurve("lift needs a planar curve".into()));
    }
    let mut path: Vec<[f64; 2]> = planar.iter().map(|p| [p.0[0], p.0[1]]).collect();
    if planar_closed {
        path.push(path[0]);
    }
    let mut cum = vec![0.0];
    for w in path.windows(2) {
        let d = ((w[1][0] - w[0][0]).powi(2) + (w[1][1] - w[0][1]).powi(2)).sqrt();
        cum.push(cum.last().unwrap() + d);
    }
    let total = *cum.last().unwrap();
    if total <= 0.0 {
        return Err(Error::InvalidCurve("planar curve has zero length".into()));
    }
    let at = |t: f64| -> [f64; 2] {
        let k = match cum.binary_search_by(|c| c.partial_cmp(&t).unwrap()) {
            Ok(k) => return path[k],
            Err(k) => k.clamp(1, path.len() - 1),
        };
        let (a, b) = (path[k - 1], path[k]);
        let seg = cum[k] - cum[k - 1];
        let u = if seg > 0.0 { (t - cum[k - 1]) / seg } else { 0.0 };
        [a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1])]
    };
    let planar_pts: Vec<[f64; 2]> = (0..=steps).map(|i| at(total * i as f64 / steps as f64)).collect();
    let mut cur: heisenberg::H = [planar_pts[0][0], planar_pts[0][1], 0.0];
    let mut out = vec![Point(cur.to_vec())];
    for w in planar_pts.windows(2) {
        let step = [w[1][0] - w[0][0], w[1][1] - w[0][1], 0.0];
        cur = heisenberg::mul(&cur, &step);
        out.push(Point(cur.to_vec()));
    }
    Ok(out)
}

/// Interval of loop parameters `[start, end]`; `end` may exceed the loop
/// length, in which case the interval wraps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamInterval {
    pub start: f64,
    pub end: f64,
}

impl ParamInterval {
    pub fn new(start: f64, end: f64) -> Self {
        ParamInterval { start, end }
    }

    pub fn len(&self) -> f64 {
        self.end - self.start
    }
}

/// Uniform samples of a curve at parameters `offset + j * step`.
#[derive(Clone, Debug)]
pub struct CurveSamples {
    pub params: Vec<f64>,
    pub points: Vec<Point>,
    pub step: f64,
    /// True when the samples cover the whole loop and index arithmetic wraps.
    pub cyclic: bool,
}

impl CurveSamples {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Indices of samples in the closed ball `B(center, radius)`.
    ///
    /// Consecutive samples are at most `step` apart, so after a far sample
    /// the scan can jump ahead without missing any member.
    pub fn within(&self, space: &MetricSpace, center: &Point, radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        let n = self.points.len();
        let mut i = 0;
        while i < n {
            let d = space.dist(&self.points[i], center);
            if d <= radius {
                out.push(i);
                i += 1;
            } else {
                let skip = ((d - radius) / self.step * (1.0 - 1e-9)).floor();
                i += if skip >= 1.0 { skip as usize } else { 1 };
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct Curve {
    space: MetricSpace,
    vertices: Vec<Point>,
    cumlen: Vec<f64>,
    closed: bool,
    label: String,
    diam: f64,
}

/// Generates a curve from one of the built-in families in its default space.
pub fn generate_curve(spec: &CurveSpec) -> Result<Curve> {
    generate_curve_in(spec, spec.default_space())
}

/// Generates a curve, reading planar coordinates in `space`.
pub fn generate_curve_in(spec: &CurveSpec, space: MetricSpace) -> Result<Curve> {
    let mut c = match spec {
        CurveSpec::HeisenbergLift { planar, steps } => {
            if !matches!(space.kind(), SpaceKind::Heisenberg) {
                return Err(Error::InvalidCurve("lifts live in the Heisenberg group".into()));
            }
            let (pv, pclosed) = planar.planar_vertices()?;
            let v = horizontal_lift(&pv, pclosed, *steps)?;
            arclength_parametrize(&space, &v, false)?
        }
        _ => {
            let (v, closed) = spec.planar_vertices()?;
            arclength_parametrize(&space, &v, closed)?
        }
    };
    c.label = spec.label();
    Ok(c)
}

/// Builds the loop parametrisation of a polyline. Consecutive repeated
/// vertices are collapsed.
pub fn arclength_parametrize(space: &MetricSpace, vertices: &[Point], closed: bool) -> Result<Curve> {
    if matches!(space.kind(), SpaceKind::Embedded(_)) {
        return Err(Error::InvalidCurve("curves need a space with segments".into()));
    }
    for v in vertices {
        space.check_point(v)?;
    }
    let mut path: Vec<Point> = Vec::with_capacity(vertices.len() + 1);
    for v in vertices {
        if path.last() != Some(v) {
            path.push(v.clone());
        }
    }
    if closed && path.len() > 1 && path.first() == path.last() {
        path.pop();
    }
    if path.len() < 2 {
        return Err(Error::InvalidCurve("fewer than 2 distinct vertices".into()));
    }
    let image = path.clone();
    let mut lp = path.clone();
    if closed {
        lp.push(path[0].clone());
    } else {
        lp.extend(path.iter().rev().skip(1).cloned());
    }
    let mut cumlen = Vec::with_capacity(lp.len());
    cumlen.push(0.0);
    for w in lp.windows(2) {
        let d = space.dist(&w[0], &w[1]);
        cumlen.push(cumlen.last().unwrap() + d);
    }
    let mut diam: f64 = 0.0;
    for i in 0..image.len() {
        for j in i + 1..image.len() {
            diam = diam.max(space.dist(&image[i], &image[j]));
        }
    }
    Ok(Curve { space: space.clone(), vertices: lp, cumlen, closed, label: "polyline".into(), diam })
}

impl Curve {
    pub fn space(&self) -> &MetricSpace {
        &self.space
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Length of the loop domain.
    pub fn length(&self) -> f64 {
        *self.cumlen.last().unwrap()
    }

    /// One-dimensional measure of the image.
    pub fn image_length(&self) -> f64 {
        if self.closed {
            self.length()
        } else {
            self.length() / 2.0
        }
    }

    /// Parameter span covering the image once.
    pub fn image_span(&self) -> f64 {
        self.image_length()
    }

    /// Diameter of the image (exact for normed spaces, vertex-based in the
    /// Heisenberg group).
    pub fn diam(&self) -> f64 {
        self.diam
    }

    /// Loop vertices; the last equals the first.
    pub fn loop_vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Loop parameters of the vertices.
    pub fn vertex_params(&self) -> &[f64] {
        &self.cumlen
    }

    /// Vertices of the polyline as given (one traversal of the image).
    pub fn polyline(&self) -> Vec<Point> {
        let n = self.vertices.len();
        if self.closed {
            self.vertices[..n - 1].to_vec()
        } else {
            self.vertices[..n / 2 + 1].to_vec()
        }
    }

    /// Point at loop parameter `t`, taken modulo the loop length.
    pub fn point_at(&self, t: f64) -> Point {
        let l = self.length();
        let mut t = t.rem_euclid(l);
        if t >= l {
            t = 0.0;
        }
        let k = self.cumlen.partition_point(|&c| c <= t);
        let k = k.clamp(1, self.cumlen.len() - 1);
        let (a, b) = (&self.vertices[k - 1], &self.vertices[k]);
        let seg = self.cumlen[k] - self.cumlen[k - 1];
        let u = if seg > 0.0 { ((t - self.cumlen[k - 1]) / seg).clamp(0.0, 1.0) } else { 0.0 };
        Point(a.0.iter().zip(&b.0).map(|(x, y)| x + u * (y - x)).collect())
    }

    /// Uniform samples of the whole loop with spacing at most `step`.
    pub fn samples(&self, step: f64) -> CurveSamples {
        let l = self.length();
        let n = ((l / step).ceil() as usize).max(1);
        let h = l / n as f64;
        let params: Vec<f64> = (0..n).map(|j| j as f64 * h).collect();
        let points = params.iter().map(|&t| self.point_at(t)).collect();
        CurveSamples { params, points, step: h, cyclic: true }
    }

    /// Uniform samples covering the image once, endpoints included for open
    /// curves.
    pub fn image_samples(&self, step: f64) -> CurveSamples {
        if self.closed {
            let mut s = self.samples(step);
            s.cyclic = false;
            return s;
        }
        let span = self.image_span();
        let n = ((span / step).ceil() as usize).max(1);
        let h = span / n as f64;
        let params: Vec<f64> = (0..=n).map(|j| j as f64 * h).collect();
        let points = params.iter().map(|&t| self.point_at(t)).collect();
        CurveSamples { params, points, step: h, cyclic: false }
    }

    /// Sum of distances between consecutive loop samples.
    pub fn sampled_length(&self, step: f64) -> f64 {
        let s = self.samples(step);
        let n = s.len();
        (0..n).map(|i| self.space.dist(&s.points[i], &s.points[(i + 1) % n])).sum()
    }

    /// Writes the polyline as CSV with a one-line header naming the space.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# space={};closed={}", self.space, self.closed)?;
        for v in self.polyline() {
            let row: Vec<String> = v.0.iter().map(|c| format!("{c:?}")).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// Reads a polyline written by [`Curve::write_csv`].
    pub fn read_csv<R: BufRead>(r: R) -> Result<Curve> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| Error::InvalidCurve("empty file".into()))??;
        let header = header.trim().trim_start_matches('#').trim();
        let mut space = None;
        let mut closed = None;
        for part in header.split(';') {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidCurve(format!("bad header field '{part}'")))?;
            match k.trim() {
                "space" => space = Some(v.parse::<MetricSpace>()?),
                "closed" => {
                    closed = Some(v.trim().parse::<bool>().map_err(|_| {
                        Error::InvalidCurve(format!("bad closed flag '{v}'"))
                    })?)
                }
                other => return Err(Error::InvalidCurve(format!("unknown header field '{other}'"))),
            }
        }
        let space = space.ok_or_else(|| Error::InvalidCurve("header lacks space".into()))?;
        let closed = closed.unwrap_or(false);
        let mut verts = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let c: std::result::Result<Vec<f64>, _> =
                line.split(',').map(|x| x.trim().parse::<f64>()).collect();
            verts.push(Point(c.map_err(|_| Error::InvalidCurve(format!("bad row '{line}'")))?));
        }
        arclength_parametrize(&space, &verts, closed)
    }
}
