use betascan_core::beta::DistMatrix;
use betascan_core::metric::ordered_defect;
use betascan_core::order::{alpha_estimate, find_order, fit_linf_geodesic, mcshane_extend, order_violation};
use betascan_core::{Error, MetricSpace, Point};
use proptest::prelude::*;

fn exhaustive_ok(space: &MetricSpace, pts: &[Point], perm: &[usize]) -> bool {
    let n = perm.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (a, b, c) = (&pts[perm[i]], &pts[perm[j]], &pts[perm[k]]);
                let outer = space.dist(a, c);
                if !(outer > space.dist(a, b) && outer > space.dist(b, c)) {
                    return false;
                }
            }
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn points_on_a_line_are_ordered(mut ts in prop::collection::btree_set(-1000i32..1000, 2..25), seed in any::<u64>()) {
        let ts: Vec<f64> = std::mem::take(&mut ts).into_iter().map(|t| t as f64 / 100.0).collect();
        let mut pts: Vec<Point> = ts.iter().map(|&t| Point::xy(t, 0.5 * t)).collect();
        // Deterministic shuffle.
        let mut s = seed;
        for i in (1..pts.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            pts.swap(i, (s >> 33) as usize % (i + 1));
        }
        for space in [MetricSpace::euclidean(2).unwrap(), MetricSpace::l1(2).unwrap(), MetricSpace::linf(2).unwrap()] {
            let o = find_order(&space, &pts).unwrap();
            prop_assert!(exhaustive_ok(&space, &pts, &o.perm));
            prop_assert!(order_violation(&DistMatrix::new(&space, &pts), &o.perm).is_none());
        }
    }

    #[test]
    fn returned_orders_always_pass_the_exhaustive_check(raw in prop::collection::vec((-1.0f64..1.0, -0.05f64..0.05), 3..15)) {
        let e = MetricSpace::euclidean(2).unwrap();
        let pts: Vec<Point> = raw.iter().map(|&(x, y)| Point::xy(x, y)).collect();
        match find_order(&e, &pts) {
            Ok(o) => prop_assert!(exhaustive_ok(&e, &pts, &o.perm)),
            Err(Error::NoOrder) | Err(Error::DuplicatePoints(..)) => {}
            Err(other) => prop_assert!(false, "{other}"),
        }
    }

    #[test]
    fn extension_is_lipschitz_and_interpolates(data in prop::collection::btree_map(-100i32..100, -50i32..50, 1..12), t in 0.0f64..3.0) {
        let e: Vec<f64> = data.keys().map(|&k| k as f64 / 10.0).collect();
        // Values made 1-Lipschitz up to t by construction: a 1-Lipschitz
        // function plus noise in [0, t].
        let f: Vec<f64> = data.iter().map(|(&k, &v)| (k as f64 / 10.0).abs() + t * ((v + 50) as f64 / 100.0)).collect();
        let g = mcshane_extend(&e, &f, t).unwrap();
        for (x, y) in e.iter().zip(&f) {
            let v = g.eval(*x);
            prop_assert!(v >= *y - 1e-12 && v <= *y + t + 1e-12);
        }
        let grid: Vec<f64> = (0..200).map(|i| -12.0 + i as f64 * 0.12).collect();
        for w in grid.windows(2) {
            prop_assert!((g.eval(w[1]) - g.eval(w[0])).abs() <= (w[1] - w[0]) + 1e-12);
        }
    }

    #[test]
    fn geodesic_fit_deviation_is_bounded(d in 2usize..8, n in 3usize..12, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        // Points along a monotone staircase in linf, slightly perturbed.
        let mut x = vec![0.0; d];
        let mut pts = Vec::new();
        for _ in 0..n {
            pts.push(Point::new(x.clone()));
            x[0] += 1.0;
            for c in x.iter_mut().skip(1) {
                *c += rng.gen_range(-1.0..1.0);
            }
        }
        let eps = 1e-4;
        for p in pts.iter_mut() {
            for c in p.0.iter_mut() {
                *c += rng.gen_range(-eps..eps);
            }
        }
        let fit = fit_linf_geodesic(&pts).unwrap();
        if fit.certified {
            prop_assert!(fit.sup_deviation <= 15.0 * fit.h + 1e-12);
        }
        prop_assert!(fit.waypoint_defect <= 1e-9 * (n as f64));
    }
}

#[test]
fn equilateral_triangle_has_no_order() {
    let e = MetricSpace::euclidean(2).unwrap();
    let pts = vec![Point::xy(0.0, 0.0), Point::xy(1.0, 0.0), Point::xy(0.5, 3f64.sqrt() / 2.0)];
    assert!(matches!(find_order(&e, &pts), Err(Error::NoOrder)));
}

#[test]
fn duplicates_are_reported() {
    let e = MetricSpace::euclidean(2).unwrap();
    let pts = vec![Point::xy(0.0, 0.0), Point::xy(1.0, 0.0), Point::xy(0.0, 0.0)];
    assert!(matches!(find_order(&e, &pts), Err(Error::DuplicatePoints(0, 2))));
}

#[test]
fn sampled_segment_has_no_distortion() {
    let e = MetricSpace::euclidean(2).unwrap();
    let pts: Vec<Point> = (0..=100).map(|i| Point::xy(-1.0 + i as f64 / 50.0, 0.0)).collect();
    let a = alpha_estimate(&e, &pts, &Point::xy(0.0, 0.0), 1.0, 0.0).unwrap();
    // Only the sampling gaps of width 0.02 keep the image from filling [-r, r].
    assert!(a.eps <= 1e-12, "{a:?}");
    assert!((a.delta - 0.01).abs() <= 1e-12, "{a:?}");
}

#[test]
fn waypoints_form_a_geodesic() {
    let pts = vec![Point::new(vec![0.0, 0.0, 0.0]), Point::new(vec![1.0, 0.5, -0.3]), Point::new(vec![2.0, 0.2, 0.4]), Point::new(vec![3.0, 1.0, 0.0])];
    let fit = fit_linf_geodesic(&pts).unwrap();
    let linf = MetricSpace::linf(3).unwrap();
    let w = &fit.waypoints;
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            for k in j + 1..w.len() {
                let v = ordered_defect(linf.dist(&w[i], &w[j]), linf.dist(&w[j], &w[k]), linf.dist(&w[i], &w[k]));
                assert!(v.abs() <= 1e-12);
            }
        }
    }
    assert_eq!(fit.h, 0.0);
    assert!(fit.sup_deviation <= 1e-12);
}
