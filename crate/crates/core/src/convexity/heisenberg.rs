use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metric::heisenberg::{gauge, inv, mul, H};
use crate::metric::Point;
use crate::optim::nelder_mead;

/// The horizontal line `s -> base * (s cos(theta), s sin(theta), 0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HorizontalLine {
    pub base: H,
    pub theta: f64,
}

impl HorizontalLine {
    pub fn point(&self, s: f64) -> H {
        mul(&self.base, &[s * self.theta.cos(), s * self.theta.sin(), 0.0])
    }
}

/// Korányi distance from `x` to a horizontal line.
///
/// With `w = base^-1 x = (a, b, c)`, `u = (cos, sin)`, `m = a u1 + b u2` and
/// `k = (a u2 - b u1) / 2`, the fourth power of the distance to the point at
/// parameter `s` is `((s - m)^2 + 4k^2)^2 + (c + s k)^2`. Its derivative is a
/// cubic in `y = s - m` with non-negative linear coefficient, so the unique
/// real root is the minimiser.
pub fn dist_to_horizontal_line(x: &H, line: &HorizontalLine) -> f64 {
    let w = mul(&inv(&line.base), x);
    let (u1, u2) = (line.theta.cos(), line.theta.sin());
    let (a, b, c) = (w[0], w[1], w[2]);
    let m = a * u1 + b * u2;
    let k = 0.5 * (a * u2 - b * u1);
    let p = 4.5 * k * k;
    let q = 0.5 * k * (c + k * m);
    let disc = (0.25 * q * q + p * p * p / 27.0).sqrt();
    let mut y = (-0.5 * q + disc).cbrt() + (-0.5 * q - disc).cbrt();
    for _ in 0..3 {
        let d = 3.0 * y * y + p;
        if d == 0.0 {
            break;
        }
        y -= (y * y * y + p * y + q) / d;
    }
    let s = y + m;
    let r2 = y * y + 4.0 * k * k;
    let t = c + s * k;
    (r2 * r2 + t * t).sqrt().sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct BetaH {
    pub beta: f64,
    pub line: HorizontalLine,
    pub evaluations: usize,
}

const STARTS: usize = 16;
const BUDGET_PER_START: usize = 150;

/// Best sup-distance from `pts` to a horizontal line, over `radius`, found by
/// simplex searches over base point and direction from 16 deterministic
/// starts.
pub fn beta_heisenberg(pts: &[Point], radius: f64, seed: u64) -> Result<BetaH> {
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter("radius must be positive".into()));
    }
    let hp: Vec<H> = pts
        .iter()
        .map(|p| {
            if p.dim() != 3 {
                return Err(Error::DimensionMismatch { expected: 3, found: p.dim() });
            }
            if p.0.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite);
            }
            Ok([p.0[0], p.0[1], p.0[2]])
        })
        .collect::<Result<_>>()?;
    let flat = HorizontalLine { base: hp.first().copied().unwrap_or([0.0; 3]), theta: 0.0 };
    if hp.len() < 2 {
        return Ok(BetaH { beta: 0.0, line: flat, evaluations: 0 });
    }
    let objective = |x: &[f64]| {
        let line = HorizontalLine { base: [x[0], x[1], x[2]], theta: x[3] };
        hp.iter().map(|p| dist_to_horizontal_line(p, &line)).fold(0.0, f64::max) / radius
    };
    let toward = |from: &H, to: &H| {
        let w = mul(&inv(from), to);
        w[1].atan2(w[0])
    };
    let farthest = |i: usize| {
        (0..hp.len()).max_by(|&a, &b| gauge(&mul(&inv(&hp[i]), &hp[a])).total_cmp(&gauge(&mul(&inv(&hp[i]), &hp[b])))).unwrap()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts: Vec<[f64; 4]> = Vec::with_capacity(STARTS);
    let mut push = |i: usize, theta: f64| {
        let b = hp[i];
        starts.push([b[0], b[1], b[2], theta]);
    };
    let e = farthest(0);
    let s = farthest(e);
    push(e, toward(&hp[e], &hp[s]));
    for k in 1..STARTS {
        let i = rng.gen_range(0..hp.len());
        let theta = if k % 2 == 1 { toward(&hp[i], &hp[farthest(i)]) } else { rng.gen_range(0.0..std::f64::consts::PI) };
        push(i, theta);
    }
    let scale = [radius / 4.0, radius / 4.0, radius * radius / 4.0, 0.2];
    let mut best = (f64::INFINITY, starts[0]);
    let mut evaluations = 0;
    for st in &starts {
        let m = nelder_mead(objective, st, &scale, BUDGET_PER_START);
        evaluations += m.evaluations;
        if m.value < best.0 {
            best = (m.value, [m.x[0], m.x[1], m.x[2], m.x[3]]);
        }
    }
    let x = best.1;
    Ok(BetaH { beta: best.0, line: HorizontalLine { base: [x[0], x[1], x[2]], theta: x[3] }, evaluations })
}
