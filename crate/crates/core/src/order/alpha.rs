use std::ops::Range;

use crate::beta::DistMatrix;
use crate::error::{Error, Result};
use crate::metric::{MetricSpace, Point};

use super::find_order_matrix;

/// Upper bound on how far a ball is from an isometric copy of an interval,
/// witnessed by a distance function `I(x) = d(x_1, x) - d(x_1, c)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaEstimate {
    /// `(eps + delta) / r`.
    pub alpha_upper: f64,
    /// Largest additive distortion `||I(x) - I(y)| - d(x, y)|`.
    pub eps: f64,
    /// Largest distance from a point of `[-r, r]` to the image of `I`.
    pub delta: f64,
    /// Index (into the input) of the anchor `x_1`.
    pub anchor: usize,
    /// Size of the ordered net.
    pub net_size: usize,
}

/// Largest `beta^2` for which the ordered-net construction applies, with
/// inflation factor `a`.
pub fn alpha_regime_threshold(a: f64) -> f64 {
    1.0 / (24.0 * a * a * (16.0 * a + 1.0))
}

/// Builds `I` from the first point of an order on a `2 beta diam`-net of the
/// ball's points. Fails with [`Error::NoOrder`] when the net has no order.
pub fn alpha_estimate(space: &MetricSpace, pts: &[Point], center: &Point, radius: f64, beta: f64) -> Result<AlphaEstimate> {
    let (mut est, img) = distortion(space, pts, center, radius, beta)?;
    let mut sorted = img;
    sorted.sort_by(f64::total_cmp);
    let runs: Vec<(f64, f64)> = sorted.iter().map(|&v| (v, v)).collect();
    est.delta = gap(&runs, radius);
    est.alpha_upper = (est.eps + est.delta) / radius;
    Ok(est)
}

/// Same as [`alpha_estimate`] for points listed along arcs of a curve that
/// stay in the ball, `runs` giving the index range of each arc. `I` is
/// continuous along an arc, so the image of an arc covers everything between
/// its extreme values and sampling gaps inside an arc do not count.
pub fn alpha_estimate_on_arcs(
    space: &MetricSpace,
    pts: &[Point],
    runs: &[Range<usize>],
    center: &Point,
    radius: f64,
    beta: f64,
) -> Result<AlphaEstimate> {
    if runs.iter().any(|r| r.is_empty() || r.end > pts.len()) {
        return Err(Error::InvalidParameter("arc runs must be non-empty ranges of the points".into()));
    }
    let (mut est, img) = distortion(space, pts, center, radius, beta)?;
    let mut spans: Vec<(f64, f64)> = runs
        .iter()
        .map(|r| img[r.clone()].iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v))))
        .collect();
    spans.sort_by(|a, b| a.0.total_cmp(&b.0));
    est.delta = gap(&spans, radius);
    est.alpha_upper = (est.eps + est.delta) / radius;
    Ok(est)
}

/// Largest distance from a point of `[-r, r]` to a union of intervals
/// sorted by left end.
fn gap(spans: &[(f64, f64)], r: f64) -> f64 {
    let mut delta = spans[0].0 + r;
    let mut reach = spans[0].1;
    for s in &spans[1..] {
        delta = delta.max((s.0 - reach) / 2.0);
        reach = reach.max(s.1);
    }
    delta.max(r - reach).max(0.0)
}

/// The map `I` with its distortion `eps`, and the image of every point.
fn distortion(space: &MetricSpace, pts: &[Point], center: &Point, radius: f64, beta: f64) -> Result<(AlphaEstimate, Vec<f64>)> {
    if pts.is_empty() {
        return Err(Error::Degenerate("empty ball".into()));
    }
    if !(radius > 0.0) || !(beta >= 0.0) {
        return Err(Error::InvalidParameter("radius must be positive and beta non-negative".into()));
    }
    let full = DistMatrix::new(space, pts);
    let diam = full.diam();
    // Points closer than rounding noise count as one.
    let sep = (2.0 * beta * diam).max(1e-12 * diam);
    let mut net: Vec<usize> = Vec::new();
    for i in 0..pts.len() {
        if net.iter().all(|&j| full.get(i, j) > sep) {
            net.push(i);
        }
    }
    let sub = DistMatrix::new(space, net.iter().map(|&i| &pts[i]));
    let order = find_order_matrix(&sub)?;
    let anchor = net[order.perm[0]];
    let shift = space.dist(&pts[anchor], center);
    let img: Vec<f64> = (0..pts.len()).map(|i| full.get(anchor, i) - shift).collect();
    let mut eps: f64 = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            eps = eps.max(((img[i] - img[j]).abs() - full.get(i, j)).abs());
        }
    }
    Ok((AlphaEstimate { alpha_upper: 0.0, eps, delta: 0.0, anchor, net_size: net.len() }, img))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_at_default_inflation() {
        assert!((alpha_regime_threshold(10.0) - 1.0 / 386_400.0).abs() < 1e-20);
    }

    #[test]
    fn segment_is_isometric() {
        let e = MetricSpace::euclidean(2).unwrap();
        let pts: Vec<Point> = (0..=100).map(|i| Point::xy(-1.0 + i as f64 * 0.02, 0.0)).collect();
        let a = alpha_estimate(&e, &pts, &Point::xy(0.0, 0.0), 1.0, 0.0).unwrap();
        assert!(a.eps < 1e-12);
        assert!((a.delta - 0.01).abs() < 1e-12);
        let arcs = alpha_estimate_on_arcs(&e, &pts, &[0..101], &Point::xy(0.0, 0.0), 1.0, 0.0).unwrap();
        assert!(arcs.eps < 1e-12 && arcs.delta < 1e-12);
    }

    #[test]
    fn arc_gaps_count_between_arcs_only() {
        let e = MetricSpace::euclidean(2).unwrap();
        let pts: Vec<Point> = [-1.0, -0.2, 0.2, 1.0].iter().map(|&x| Point::xy(x, 0.0)).collect();
        let a = alpha_estimate_on_arcs(&e, &pts, &[0..2, 2..4], &Point::xy(0.0, 0.0), 1.0, 0.0).unwrap();
        assert!((a.delta - 0.2).abs() < 1e-12);
        let one = alpha_estimate_on_arcs(&e, &pts, &[0..4], &Point::xy(0.0, 0.0), 1.0, 0.0).unwrap();
        assert!(one.delta < 1e-12);
    }
}
