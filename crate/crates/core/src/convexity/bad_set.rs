use serde::{Deserialize, Serialize};

use crate::beta::{level_samples, DistMatrix};
use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::metric::{Point, SpaceKind};
use crate::net::Multires;
use crate::order::beta_net_linf;
use crate::par;

use super::heisenberg::beta_heisenberg;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BadSetOptions {
    pub q: f64,
    pub r_exp: f64,
    pub c_grid: Vec<f64>,
    pub sample_shift: i32,
    /// Constant assumed in the length-versus-diameter hypothesis.
    pub assumed_c_r: f64,
    pub seed: u64,
}

impl Default for BadSetOptions {
    fn default() -> Self {
        BadSetOptions {
            q: 3.0,
            r_exp: 3.5,
            c_grid: vec![0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0],
            sample_shift: 3,
            assumed_c_r: 10.0,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BadSetBall {
    pub level: i32,
    pub index: usize,
    pub radius: f64,
    pub diam: f64,
    pub beta_net: f64,
    pub beta_h: f64,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BadSetPoint {
    pub c: f64,
    /// `M_r` of the bad set over `M_r` of the whole family.
    pub fraction: f64,
    pub mass: f64,
    pub members: usize,
    /// Members within 5% of the threshold.
    pub uncertain: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BadSetReport {
    pub balls: Vec<BadSetBall>,
    pub points: Vec<BadSetPoint>,
    pub total_mass: f64,
    /// `length / (2 C_r diam)`; at least 1 when the hypothesis holds.
    pub long_curve_margin: f64,
}

/// `sum beta_H^r diam(B)` in ball order.
pub fn measure_mr(balls: &[BadSetBall], r_exp: f64) -> f64 {
    balls.iter().map(|b| b.beta_h.powf(r_exp) * b.diam).sum()
}

fn is_bad(b: &BadSetBall, c: f64, q: f64) -> bool {
    b.beta_net > c * b.beta_h.powf(q)
}

/// Bad-set fractions over a grid of `c`. Membership shrinks as `c` grows and
/// the masses are summed in a fixed order over non-negative terms, so the
/// fractions are non-increasing in `c`.
pub fn bad_set_fractions(balls: &[BadSetBall], q: f64, r_exp: f64, c_grid: &[f64]) -> Vec<BadSetPoint> {
    let total = measure_mr(balls, r_exp);
    c_grid
        .iter()
        .map(|&c| {
            let mut mass = 0.0;
            let (mut members, mut uncertain) = (0, 0);
            for b in balls {
                let thr = c * b.beta_h.powf(q);
                if is_bad(b, c, q) {
                    mass += b.beta_h.powf(r_exp) * b.diam;
                    members += 1;
                    if (b.beta_net - thr).abs() < 0.05 * thr {
                        uncertain += 1;
                    }
                }
            }
            BadSetPoint { c, fraction: if total > 0.0 { mass / total } else { 0.0 }, mass, members, uncertain }
        })
        .collect()
}

/// Computes net flatness and horizontal-line flatness for every ball above
/// the finest level of a Heisenberg curve and the bad-set fractions.
pub fn bad_set_experiment(curve: &Curve, mr: &Multires, opts: &BadSetOptions) -> Result<BadSetReport> {
    if !matches!(curve.space().kind(), SpaceKind::Heisenberg) {
        return Err(Error::InvalidSpace("the bad-set experiment runs in the Heisenberg group".into()));
    }
    if opts.c_grid.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
        return Err(Error::InvalidParameter("grid values must be positive".into()));
    }
    let space = curve.space();
    let fam = &mr.family;
    let samples = level_samples(curve, fam.n_min, fam.n_max, opts.sample_shift);
    let src = &mr.source.points;
    let balls: Vec<usize> = (0..fam.balls.len()).filter(|&k| fam.balls[k].level < fam.n_max).collect();
    let out = par::map_indexed(balls.len(), |j| -> Result<BadSetBall> {
        let b = &fam.balls[balls[j]];
        let next = mr.nets.level(b.level + 1);
        let net: Vec<Point> = next.iter().filter(|&&i| space.dist(&src[i], &b.center) <= b.radius).map(|&i| src[i].clone()).collect();
        let reference: Vec<Point> =
            next.iter().filter(|&&i| space.dist(&src[i], &b.center) <= 4.0 * b.radius).map(|&i| src[i].clone()).collect();
        let nb = beta_net_linf(space, &net, &reference, b.radius)?;
        let s = &samples[(b.level - fam.n_min) as usize];
        let pts: Vec<Point> = s.within(space, &b.center, b.radius).into_iter().map(|i| s.points[i].clone()).collect();
        let diam = DistMatrix::new(space, &pts).diam();
        let seed = opts.seed ^ ((b.level as i64 as u64) << 40) ^ b.index as u64;
        let bh = beta_heisenberg(&pts, b.radius, seed)?;
        Ok(BadSetBall { level: b.level, index: b.index, radius: b.radius, diam, beta_net: nb.value, beta_h: bh.beta, certified: nb.certified })
    });
    let balls = out.into_iter().collect::<Result<Vec<_>>>()?;
    let points = bad_set_fractions(&balls, opts.q, opts.r_exp, &opts.c_grid);
    Ok(BadSetReport {
        total_mass: measure_mr(&balls, opts.r_exp),
        long_curve_margin: curve.image_length() / (2.0 * opts.assumed_c_r * curve.diam()),
        balls,
        points,
    })
}
