use crate::beta::DistMatrix;
use crate::error::{Error, Result};
use crate::metric::{kuratowski_embed, MetricSpace, Point, SpaceKind};

use super::{find_order_matrix, fit_linf_geodesic};

/// Net flatness of a ball measured after embedding into `linf`.
#[derive(Clone, Debug, PartialEq)]
pub struct NetBeta {
    pub value: f64,
    /// Largest ordered defect of the ordered net points.
    pub h: f64,
    pub separation: f64,
    /// Whether the net had an order.
    pub ordered: bool,
    /// Whether `h < separation / 200`, so that `15 h` bounds the fit.
    pub certified: bool,
    /// Distance of the net points to the constructed geodesic.
    pub deviation: f64,
    pub n_points: usize,
}

/// Net flatness of the points `net` (the next-level net inside the ball),
/// embedded through distances to `reference` (the next-level net inside the
/// ball inflated four times, containing `net`).
///
/// The value is `min(1, 15 h / radius)` when certified. Otherwise it falls
/// back to the deviation of the constructed geodesic, which is still an
/// upper bound when the construction yields a geodesic, and to 1 when no
/// order or no geodesic is available. Uncertified values are flagged.
pub fn beta_net_linf(space: &MetricSpace, net: &[Point], reference: &[Point], radius: f64) -> Result<NetBeta> {
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter("radius must be positive".into()));
    }
    let n = net.len();
    if n < 3 {
        return Ok(NetBeta { value: 0.0, h: 0.0, separation: f64::INFINITY, ordered: true, certified: true, deviation: 0.0, n_points: n });
    }
    let image: Vec<Point> = if matches!(space.kind(), SpaceKind::Linf { .. }) {
        net.to_vec()
    } else {
        let (_, img) = kuratowski_embed(space, reference, reference)?;
        net.iter()
            .map(|x| {
                reference
                    .iter()
                    .position(|r| r == x)
                    .map(|k| img[k].clone())
                    .ok_or_else(|| Error::InvalidParameter("net point missing from the reference set".into()))
            })
            .collect::<Result<Vec<_>>>()?
    };
    let target = MetricSpace::linf(image[0].dim())?;
    let dm = DistMatrix::new(&target, &image);
    let unordered = NetBeta { value: 1.0, h: f64::NAN, separation: 0.0, ordered: false, certified: false, deviation: f64::NAN, n_points: n };
    let order = match find_order_matrix(&dm) {
        Ok(o) => o,
        Err(Error::NoOrder) => return Ok(unordered),
        Err(e) => return Err(e),
    };
    let tuple: Vec<Point> = order.perm.iter().map(|&i| image[i].clone()).collect();
    let fit = match fit_linf_geodesic(&tuple) {
        Ok(f) => f,
        Err(Error::DuplicatePoints(..)) => return Ok(unordered),
        Err(e) => return Err(e),
    };
    let scale = dm.diam();
    let value = if fit.certified {
        (15.0 * fit.h / radius).min(1.0)
    } else if fit.waypoint_defect <= 1e-9 * scale {
        (fit.sup_deviation / radius).min(1.0)
    } else {
        1.0
    };
    Ok(NetBeta {
        value,
        h: fit.h,
        separation: fit.separation,
        ordered: true,
        certified: fit.certified,
        deviation: fit.sup_deviation,
        n_points: n,
    })
}
