//! Orders on finite sets, isometry defects and geodesic fits in `linf`.

mod alpha;
mod extension;
mod geodesic;
mod net_beta;

pub use alpha::{alpha_estimate, alpha_estimate_on_arcs, alpha_regime_threshold, AlphaEstimate};
pub use extension::{mcshane_extend, LipschitzExtension};
pub use geodesic::{fit_linf_geodesic, GeodesicFit};
pub use net_beta::{beta_net_linf, NetBeta};

use crate::beta::DistMatrix;
use crate::error::{Error, Result};
use crate::metric::{MetricSpace, Point};

/// A permutation of a finite set such that for positions `i < j < k` the
/// outer distance strictly exceeds both inner ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Order {
    pub perm: Vec<usize>,
}

/// Relative margin by which outer distances must exceed inner ones, so that
/// rounding noise cannot manufacture an order.
pub const ORDER_MARGIN: f64 = 1e-12;

/// First triple of positions violating the order condition, if any.
pub fn order_violation(dm: &DistMatrix, perm: &[usize]) -> Option<(usize, usize, usize)> {
    let n = perm.len();
    let tol = ORDER_MARGIN * dm.diam();
    for i in 0..n {
        for k in i + 2..n {
            let dik = dm.get(perm[i], perm[k]);
            for j in i + 1..k {
                if !(dik > dm.get(perm[i], perm[j]) + tol && dik > dm.get(perm[j], perm[k]) + tol) {
                    return Some((i, j, k));
                }
            }
        }
    }
    None
}

/// Finds an order of `pts`.
///
/// In an order the first point sees the others at strictly increasing
/// distances, and the first and last points form the unique diametral pair.
/// So it suffices to sort by distance from either end of a diametral pair
/// and verify; if neither candidate passes, no order exists.
pub fn find_order(space: &MetricSpace, pts: &[Point]) -> Result<Order> {
    for p in pts {
        space.check_point(p)?;
    }
    let dm = DistMatrix::new(space, pts);
    let n = pts.len();
    for i in 0..n {
        for j in i + 1..n {
            if dm.get(i, j) == 0.0 {
                return Err(Error::DuplicatePoints(i, j));
            }
        }
    }
    find_order_matrix(&dm)
}

pub fn find_order_matrix(dm: &DistMatrix) -> Result<Order> {
    let n = dm.len();
    if n <= 2 {
        return Ok(Order { perm: (0..n).collect() });
    }
    let (mut p, mut q, mut best) = (0, 1, -1.0);
    for i in 0..n {
        for j in i + 1..n {
            if dm.get(i, j) > best {
                (p, q, best) = (i, j, dm.get(i, j));
            }
        }
    }
    for start in [p, q] {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.sort_by(|&a, &b| dm.get(start, a).total_cmp(&dm.get(start, b)).then(a.cmp(&b)));
        if order_violation(dm, &perm).is_none() {
            return Ok(Order { perm });
        }
    }
    Err(Error::NoOrder)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collinear_points_are_ordered() {
        let e = MetricSpace::euclidean(2).unwrap();
        let pts = vec![Point::xy(2.0, 0.0), Point::xy(0.0, 0.0), Point::xy(3.0, 0.0), Point::xy(1.0, 0.0)];
        assert_eq!(find_order(&e, &pts).unwrap().perm, vec![1, 3, 0, 2]);
    }

    #[test]
    fn equilateral_has_no_order() {
        let e = MetricSpace::euclidean(2).unwrap();
        let pts = vec![Point::xy(0.0, 0.0), Point::xy(1.0, 0.0), Point::xy(0.5, 3f64.sqrt() / 2.0)];
        assert_eq!(find_order(&e, &pts), Err(Error::NoOrder));
    }

    #[test]
    fn duplicates_are_rejected() {
        let e = MetricSpace::euclidean(2).unwrap();
        let pts = vec![Point::xy(0.0, 0.0), Point::xy(1.0, 0.0), Point::xy(0.0, 0.0)];
        assert_eq!(find_order(&e, &pts), Err(Error::DuplicatePoints(0, 2)));
    }
}
