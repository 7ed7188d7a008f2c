use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::metric::{lp_norm, MetricSpace};
use crate::optim::scan_then_refine;

/// Power-type modulus `delta(eps) >= c eps^q` of an `lp` space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvexityProfile {
    pub p: f64,
    pub q: f64,
    pub c: f64,
}

pub fn convexity_profile(space: &MetricSpace) -> Result<ConvexityProfile> {
    let p = space.exponent().ok_or_else(|| Error::InvalidSpace("not a normed space".into()))?;
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidSpace(format!("{space} is not uniformly convex")));
    }
    Ok(if p <= 2.0 {
        ConvexityProfile { p, q: 2.0, c: (p - 1.0) / 8.0 }
    } else {
        ConvexityProfile { p, q: p, c: 2f64.powf(-p) / p }
    })
}

/// Modulus of convexity of `lp`. Closed form for `p >= 2`; for `1 < p < 2`
/// the infimum is taken numerically over pairs of unit vectors of the plane
/// at distance `eps`.
pub fn modulus_of_convexity(profile: &ConvexityProfile, eps: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&eps) {
        return Err(Error::InvalidParameter(format!("eps must lie in [0, 2], got {eps}")));
    }
    let p = profile.p;
    if eps == 0.0 {
        return Ok(0.0);
    }
    if p >= 2.0 {
        return Ok(1.0 - (1.0 - (eps / 2.0).powf(p)).powf(1.0 / p));
    }
    let unit = |a: f64| {
        let v = [a.cos(), a.sin()];
        let n = lp_norm(v.iter().copied(), p);
        [v[0] / n, v[1] / n]
    };
    let norm = |v: [f64; 2]| lp_norm(v.iter().copied(), p);
    // For a start angle, the partner at chord length eps along the arc.
    let value = |a: f64| {
        let x = unit(a);
        let chord = |b: f64| {
            let y = unit(b);
            norm([x[0] - y[0], x[1] - y[1]])
        };
        let (mut lo, mut hi) = (a, a + PI);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if chord(mid) < eps {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let y = unit(hi);
        1.0 - norm([(x[0] + y[0]) / 2.0, (x[1] + y[1]) / 2.0])
    };
    let (_, v) = scan_then_refine(value, 0.0, PI / 2.0, 360, 80);
    Ok(v.max(0.0))
}

/// Modulus of `lp`, `1 < p <= 2`, from the implicit equation
/// `(1 - d + eps/2)^p + |1 - d - eps/2|^p = 2`.
pub fn hanner_modulus(p: f64, eps: f64) -> f64 {
    let g = |d: f64| (1.0 - d + eps / 2.0).powf(p) + (1.0 - d - eps / 2.0).abs().powf(p) - 2.0;
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_closed_form() {
        let pr = convexity_profile(&MetricSpace::euclidean(2).unwrap()).unwrap();
        assert_eq!(pr.q, 2.0);
        let e: f64 = 0.7;
        let d = modulus_of_convexity(&pr, e).unwrap();
        assert!((d - (1.0 - (1.0 - e * e / 4.0).sqrt())).abs() < 1e-15);
    }

    #[test]
    fn exponent_table() {
        for (p, q) in [(1.5, 2.0), (3.0, 3.0), (4.0, 4.0)] {
            assert_eq!(convexity_profile(&MetricSpace::lp(2, p).unwrap()).unwrap().q, q);
        }
        assert!(convexity_profile(&MetricSpace::l1(2).unwrap()).is_err());
        assert!(convexity_profile(&MetricSpace::linf(2).unwrap()).is_err());
    }

    #[test]
    fn rejects_eps_out_of_range() {
        let pr = convexity_profile(&MetricSpace::lp(2, 3.0).unwrap()).unwrap();
        assert!(modulus_of_convexity(&pr, 2.5).is_err());
    }
}
