//! Small derivative-free minimisers.

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    const R: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - R * (hi - lo);
    let mut x2 = lo + R * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - R * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + R * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Minimum of `f` on `[lo, hi]`: a uniform scan with `grid` cells followed
/// by golden-section refinement around the best cell. Robust to a few local
/// minima.
pub fn scan_then_refine<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, grid: usize, iters: usize) -> (f64, f64) {
    let grid = grid.max(2);
    let h = (hi - lo) / grid as f64;
    let (mut bx, mut bf) = (lo, f(lo));
    for k in 1..=grid {
        let x = lo + k as f64 * h;
        let v = f(x);
        if v < bf {
            (bx, bf) = (x, v);
        }
    }
    let (x, v) = golden_section(&mut f, (bx - h).max(lo), (bx + h).min(hi), iters);
    if v < bf {
        (x, v)
    } else {
        (bx, bf)
    }
}

/// Result of a Nelder-Mead run.
#[derive(Clone, Debug)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

/// Nelder-Mead simplex search from `x0` with initial edge lengths `scale`,
/// stopping after `budget` evaluations. Never returns a point worse than
/// `x0`.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], scale: &[f64], budget: usize) -> Minimum {
    let n = x0.len();
    let mut evals = 0;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), v0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += scale[i];
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }
    while evals < budget {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let worst = simplex[n].1;
        let centroid: Vec<f64> = (0..n).map(|j| simplex[..n].iter().map(|s| s.0[j]).sum::<f64>() / n as f64).collect();
        let towards = |t: f64, from: &[f64]| -> Vec<f64> {
            (0..n).map(|j| centroid[j] + t * (from[j] - centroid[j])).collect()
        };
        let xr = towards(-1.0, &simplex[n].0);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = towards(-2.0, &simplex[n].0);
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let xc = if fr < worst { towards(-0.5, &simplex[n].0) } else { towards(0.5, &simplex[n].0) };
            let fc = eval(&xc, &mut evals);
            if fc < worst.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for s in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = (0..n).map(|j| best[j] + 0.5 * (s.0[j] - best[j])).collect();
                    let v = eval(&x, &mut evals);
                    *s = (x, v);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    Minimum { x, value, evaluations: evals }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_minimum() {
        let (x, v) = golden_section(|x| (x - 0.3) * (x - 0.3), -1.0, 2.0, 80);
        assert!((x - 0.3).abs() < 1e-8 && v < 1e-15);
    }

    #[test]
    fn nelder_mead_on_quadratic() {
        let m = nelder_mead(|x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2), &[0.0, 0.0], &[0.5, 0.5], 400);
        assert!(m.value < 1e-8);
    }

    #[test]
    fn nelder_mead_never_worse_than_start() {
        let f = |x: &[f64]| x[0].abs() + (x[1] * 7.0).sin();
        let m = nelder_mead(f, &[0.2, 0.1], &[1.0, 1.0], 50);
        assert!(m.value <= f(&[0.2, 0.1]));
    }
}
