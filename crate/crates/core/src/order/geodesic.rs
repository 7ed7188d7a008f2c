use crate::beta::DistMatrix;
use crate::error::{Error, Result};
use crate::metric::{ordered_defect, MetricSpace, Point};
use crate::optim::golden_section;

use super::extension::mcshane_extend;
use super::order_violation;

/// A polyline geodesic in `linf` fitted to an ordered tuple.
#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicFit {
    pub waypoints: Vec<Point>,
    /// Largest ordered defect of the tuple.
    pub h: f64,
    /// Smallest distance between tuple points.
    pub separation: f64,
    /// Whether `h < separation / 200`, the regime where the fit is
    /// guaranteed within `15 h` of every tuple point.
    pub certified: bool,
    /// Largest distance from a tuple point to the polyline.
    pub sup_deviation: f64,
    /// Largest ordered defect among waypoints; zero up to rounding when the
    /// polyline is a geodesic.
    pub waypoint_defect: f64,
}

/// Fits a geodesic to the ordered tuple `x_1, ..., x_n` in `linf(d)`.
///
/// The coordinate where the endpoints differ most parametrises the fit; every
/// other coordinate is replaced by the least 1-Lipschitz extension of its
/// values over that parameter, with the minimal additive slack that makes
/// the data admissible.
pub fn fit_linf_geodesic(points: &[Point]) -> Result<GeodesicFit> {
    let n = points.len();
    if n < 2 {
        return Err(Error::InvalidParameter("need at least two points".into()));
    }
    let d = points[0].dim();
    let space = MetricSpace::linf(d)?;
    for p in points {
        space.check_point(p)?;
    }
    let dm = DistMatrix::new(&space, points);
    let mut separation = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            if dm.get(i, j) == 0.0 {
                return Err(Error::DuplicatePoints(i, j));
            }
            separation = separation.min(dm.get(i, j));
        }
    }
    let ident: Vec<usize> = (0..n).collect();
    if let Some((i, j, k)) = order_violation(&dm, &ident) {
        return Err(Error::NotOrdered(i, j, k));
    }
    let h = sup_ordered(&dm);
    let (x1, xn) = (&points[0].0, &points[n - 1].0);
    let mut i0 = 0;
    for m in 1..d {
        if (x1[m] - xn[m]).abs() > (x1[i0] - xn[i0]).abs() {
            i0 = m;
        }
    }
    let e: Vec<f64> = points.iter().map(|p| p.0[i0]).collect();
    let mut way: Vec<Vec<f64>> = vec![vec![0.0; d]; n];
    for (w, &v) in way.iter_mut().zip(&e) {
        w[i0] = v;
    }
    for m in (0..d).filter(|&m| m != i0) {
        let f: Vec<f64> = points.iter().map(|p| p.0[m]).collect();
        let mut t: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                t = t.max((f[i] - f[j]).abs() - (e[i] - e[j]).abs());
            }
        }
        let g = mcshane_extend(&e, &f, t)?;
        for (w, &v) in way.iter_mut().zip(&e) {
            w[m] = g.eval(v);
        }
    }
    let waypoints: Vec<Point> = way.into_iter().map(Point).collect();
    let wm = DistMatrix::new(&space, &waypoints);
    let waypoint_defect = sup_ordered(&wm);
    let sup_deviation = (0..n)
        .map(|i| {
            let mut best = space.dist(&points[i], &waypoints[i]);
            for s in waypoints.windows(2) {
                best = best.min(dist_to_segment(&points[i].0, &s[0].0, &s[1].0));
            }
            best
        })
        .fold(0.0, f64::max);
    Ok(GeodesicFit { waypoints, h, separation, certified: h < separation / 200.0, sup_deviation, waypoint_defect })
}

fn sup_ordered(dm: &DistMatrix) -> f64 {
    let n = dm.len();
    let mut h: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                h = h.max(ordered_defect(dm.get(i, j), dm.get(j, k), dm.get(i, k)));
            }
        }
    }
    h
}

/// `linf` distance from `x` to the segment `[a, b]`; the objective is convex
/// in the segment parameter.
fn dist_to_segment(x: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let f = |s: f64| {
        x.iter()
            .zip(a.iter().zip(b))
            .fold(0.0f64, |m, (xi, (ai, bi))| m.max((xi - ai - s * (bi - ai)).abs()))
    };
    let (_, v) = golden_section(f, 0.0, 1.0, 90);
    v.min(f(0.0)).min(f(1.0))
}
