use crate::error::{Error, Result};

/// The extension `g(x) = min_z (|x - z| + f(z) + t)` of data that is
/// 1-Lipschitz up to the additive slack `t`. It is 1-Lipschitz on the line
/// and piecewise linear, with knots at the data points and at most one kink
/// between neighbouring knots.
#[derive(Clone, Debug, PartialEq)]
pub struct LipschitzExtension {
    knots: Vec<f64>,
    values: Vec<f64>,
}

pub fn mcshane_extend(e: &[f64], f: &[f64], t: f64) -> Result<LipschitzExtension> {
    if e.is_empty() || e.len() != f.len() {
        return Err(Error::InvalidParameter("extension needs matching non-empty data".into()));
    }
    if !(t.is_finite() && t >= 0.0) || e.iter().chain(f).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("extension data must be finite with t >= 0".into()));
    }
    for i in 0..e.len() {
        for j in i + 1..e.len() {
            let slack = (f[i] - f[j]).abs() - (e[i] - e[j]).abs() - t;
            let scale = f[i].abs().max(f[j].abs()).max(e[i].abs()).max(e[j].abs()).max(1.0);
            if slack > 1e-12 * scale {
                return Err(Error::LipschitzViolation(i, j));
            }
        }
    }
    let mut knots: Vec<f64> = e.to_vec();
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let values = knots
        .iter()
        .map(|&z| e.iter().zip(f).map(|(&x, &v)| (z - x).abs() + v + t).fold(f64::INFINITY, f64::min))
        .collect();
    Ok(LipschitzExtension { knots, values })
}

impl LipschitzExtension {
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = &self.knots;
        let v = &self.values;
        let n = k.len();
        if x <= k[0] {
            return v[0] + (k[0] - x);
        }
        if x >= k[n - 1] {
            return v[n - 1] + (x - k[n - 1]);
        }
        let i = k.partition_point(|&z| z <= x) - 1;
        (v[i] + (x - k[i])).min(v[i + 1] + (k[i + 1] - x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_example() {
        let g = mcshane_extend(&[0.0, 2.0], &[0.0, 3.0], 1.0).unwrap();
        assert_eq!(g.eval(0.0), 1.0);
        assert_eq!(g.eval(2.0), 3.0);
    }

    #[test]
    fn violation_names_the_pair() {
        assert_eq!(mcshane_extend(&[0.0, 1.0, 2.0], &[0.0, 0.0, 5.0], 0.5), Err(Error::LipschitzViolation(0, 2)));
    }

    #[test]
    fn constant_data_adds_distance_to_the_set() {
        let g = mcshane_extend(&[0.0, 1.0, 3.0], &[2.0, 2.0, 2.0], 0.25).unwrap();
        for x in [-1.0, 0.0, 0.5, 1.0, 2.0, 2.5, 4.0] {
            let d = [0.0f64, 1.0, 3.0].iter().map(|z| (x - z).abs()).fold(f64::INFINITY, f64::min);
            assert!((g.eval(x) - (2.25 + d)).abs() < 1e-15);
        }
    }
}
