use crate::error::{Error, Result};
use crate::metric::{ordered_defect, MetricSpace, Point, SpaceKind};
use crate::optim::{golden_section, nelder_mead};

use super::modulus::ConvexityProfile;

/// Distance from `x` to the line `a + s v` in a normed space.
pub fn dist_to_line(space: &MetricSpace, x: &[f64], a: &[f64], v: &[f64]) -> f64 {
    let diff: Vec<f64> = x.iter().zip(a).map(|(x, a)| x - a).collect();
    let nd = space.norm(&diff).unwrap_or(f64::NAN);
    let nv = space.norm(v).unwrap_or(f64::NAN);
    if nv == 0.0 || nd == 0.0 {
        return nd;
    }
    match space.kind() {
        SpaceKind::Euclidean { .. } => {
            let s = diff.iter().zip(v).map(|(d, v)| d * v).sum::<f64>() / (nv * nv);
            let r: Vec<f64> = diff.iter().zip(v).map(|(d, v)| d - s * v).collect();
            return space.norm(&r).unwrap();
        }
        SpaceKind::L1 { .. } => return l1_line_dist(&diff, v),
        SpaceKind::Linf { .. } => return linf_line_dist(&diff, v),
        _ => {}
    }
    let bound = 2.0 * nd / nv;
    let mut buf = vec![0.0; diff.len()];
    let f = |s: f64| {
        for ((b, d), v) in buf.iter_mut().zip(&diff).zip(v) {
            *b = d - s * v;
        }
        space.norm(&buf).unwrap()
    };
    golden_section(f, -bound, bound, 90).1.min(nd)
}

/// `min_s sum |d_i - s v_i|`, attained at a weighted median of `d_i / v_i`.
fn l1_line_dist(d: &[f64], v: &[f64]) -> f64 {
    let mut t: Vec<(f64, f64)> = d.iter().zip(v).filter(|(_, v)| **v != 0.0).map(|(d, v)| (d / v, v.abs())).collect();
    t.sort_by(|a, b| a.0.total_cmp(&b.0));
    let half = t.iter().map(|x| x.1).sum::<f64>() / 2.0;
    let mut acc = 0.0;
    let s = t.iter().find(|x| {
        acc += x.1;
        acc >= half
    });
    let s = s.map_or(0.0, |x| x.0);
    d.iter().zip(v).map(|(d, v)| (d - s * v).abs()).sum()
}

/// `min_s max |d_i - s v_i|`: a convex piecewise-linear function whose
/// minimum sits where two of the lines `±(d_i - s v_i)` cross.
fn linf_line_dist(d: &[f64], v: &[f64]) -> f64 {
    let f = |s: f64| d.iter().zip(v).fold(0.0f64, |m, (d, v)| m.max((d - s * v).abs()));
    let mut best = f(0.0);
    for i in 0..d.len() {
        for j in i..d.len() {
            for sign in [1.0, -1.0] {
                let den = v[i] - sign * v[j];
                if den != 0.0 {
                    best = best.min(f((d[i] - sign * d[j]) / den));
                }
            }
        }
    }
    best
}

/// Flatness of a ball in a Banach space: best sup-distance of the ball's
/// points to a line, over the radius.
#[derive(Clone, Debug, PartialEq)]
pub struct BetaBanach {
    pub beta: f64,
    /// Value of the chord through the diametral pair before refinement.
    pub chord_beta: f64,
    pub point: Vec<f64>,
    pub direction: Vec<f64>,
    pub evaluations: usize,
}

const BUDGET: usize = 200;

/// Fits a line to `pts` by starting from the chord through a diametral pair
/// and refining with a simplex search. In the Euclidean plane the exact
/// minimax line is used instead.
pub fn beta_banach(space: &MetricSpace, pts: &[Point], radius: f64) -> Result<BetaBanach> {
    if !space.is_normed() {
        return Err(Error::InvalidSpace(format!("{space} is not a normed space")));
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter("radius must be positive".into()));
    }
    for p in pts {
        space.check_point(p)?;
    }
    let d = space.dim();
    if pts.len() < 3 {
        let a = pts.first().map_or(vec![0.0; d], |p| p.0.clone());
        let mut v = vec![0.0; d];
        if pts.len() == 2 {
            v = pts[1].0.iter().zip(&a).map(|(b, a)| b - a).collect();
        } else {
            v[0] = 1.0;
        }
        return Ok(BetaBanach { beta: 0.0, chord_beta: 0.0, point: a, direction: v, evaluations: 0 });
    }
    let (mut p, mut q, mut best) = (0, 1, -1.0);
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let v = space.dist(&pts[i], &pts[j]);
            if v > best {
                (p, q, best) = (i, j, v);
            }
        }
    }
    let a = pts[p].0.clone();
    let v: Vec<f64> = pts[q].0.iter().zip(&a).map(|(b, a)| b - a).collect();
    let objective = |a: &[f64], v: &[f64]| pts.iter().map(|x| dist_to_line(space, &x.0, a, v)).fold(0.0, f64::max) / radius;
    let chord_beta = objective(&a, &v);
    if matches!(space.kind(), SpaceKind::Euclidean { dim: 2 }) {
        let beta = min_width_beta(pts, radius).min(chord_beta);
        return Ok(BetaBanach { beta, chord_beta, point: a, direction: v, evaluations: 1 });
    }
    let mut x0 = a.clone();
    x0.extend_from_slice(&v);
    let mut scale = vec![radius / 8.0; d];
    scale.extend(v.iter().map(|_| best / 8.0));
    let m = nelder_mead(|x| objective(&x[..d], &x[d..]), &x0, &scale, BUDGET);
    let (point, direction, beta) = if m.value < chord_beta {
        (m.x[..d].to_vec(), m.x[d..].to_vec(), m.value)
    } else {
        (a, v, chord_beta)
    };
    Ok(BetaBanach { beta, chord_beta, point, direction, evaluations: m.evaluations + 1 })
}

/// Exact minimax line fit in the Euclidean plane: half the minimum width of
/// the convex hull, over the radius.
pub fn min_width_beta(pts: &[Point], radius: f64) -> f64 {
    let hull = convex_hull(pts);
    if hull.len() < 3 {
        return 0.0;
    }
    let n = hull.len();
    let mut width = f64::INFINITY;
    for i in 0..n {
        let (a, b) = (hull[i], hull[(i + 1) % n]);
        let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
        let len = (ex * ex + ey * ey).sqrt();
        if len == 0.0 {
            continue;
        }
        let w = hull.iter().map(|c| ((c[0] - a[0]) * ey - (c[1] - a[1]) * ex).abs() / len).fold(0.0, f64::max);
        width = width.min(w);
    }
    width / (2.0 * radius)
}

fn convex_hull(pts: &[Point]) -> Vec<[f64; 2]> {
    let mut v: Vec<[f64; 2]> = pts.iter().map(|p| [p.0[0], p.0[1]]).collect();
    v.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    v.dedup();
    if v.len() < 3 {
        return v;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in &v {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in v.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineConvexity {
    /// `(dist(y, L_xz) / r)^q r`.
    pub lhs: f64,
    /// Ordered defect of `(x, y, z)`.
    pub defect: f64,
    pub holds: bool,
}

/// Checks `(dist(y, L_xz) / r)^q r <= c * defect(x, y, z)` for the line
/// through `x` and `z`.
pub fn lineconvexity_check(
    space: &MetricSpace,
    (x, y, z): (&Point, &Point, &Point),
    r: f64,
    profile: &ConvexityProfile,
    c: f64,
) -> Result<LineConvexity> {
    for p in [x, y, z] {
        space.check_point(p)?;
    }
    if x == z {
        return Err(Error::Degenerate("line through coincident points".into()));
    }
    if !(r > 0.0) {
        return Err(Error::InvalidParameter("radius must be positive".into()));
    }
    let v: Vec<f64> = z.0.iter().zip(&x.0).map(|(z, x)| z - x).collect();
    let dist = dist_to_line(space, &y.0, &x.0, &v);
    let lhs = (dist / r).powf(profile.q) * r;
    let defect = ordered_defect(space.dist(x, y), space.dist(y, z), space.dist(x, z));
    Ok(LineConvexity { lhs, defect, holds: lhs <= c * defect + 1e-12 * r })
}
