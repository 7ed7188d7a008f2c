use betascan_core::beta::{beta_inf, beta_sum, beta_tilde, sup_symmetric_defect, BetaOptions, DistMatrix, TripleMode};
use betascan_core::curve::{generate_curve, CurveSpec, ParamInterval};
use betascan_core::metric::{symmetric_defect, triangle_defect};
use betascan_core::net::multires_for_curve;
use betascan_core::{MetricSpace, Point};
use proptest::prelude::*;

fn brute_beta(space: &MetricSpace, pts: &[Point], c: &Point, r: f64, sep: f64) -> f64 {
    let inside: Vec<&Point> = pts.iter().filter(|p| space.dist(p, c) <= r).collect();
    let mut m: f64 = 0.0;
    for i in 0..inside.len() {
        for j in i + 1..inside.len() {
            for k in j + 1..inside.len() {
                let (x, y, z) = (inside[i], inside[j], inside[k]);
                let (a, b, d) = (space.dist(x, y), space.dist(y, z), space.dist(x, z));
                if a < sep || b < sep || d < sep {
                    continue;
                }
                // Minimum over the three orderings of the triple.
                m = m.max((a + b - d).min(a + d - b).min(b + d - a));
            }
        }
    }
    (m.max(0.0) / r).sqrt()
}

fn points(max: usize) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 0..max).prop_map(|v| v.into_iter().map(|(x, y)| Point::xy(x, y)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn beta_inf_matches_exhaustive_search(pts in points(30), cx in -0.5f64..0.5, r in 0.2f64..2.0, frac in prop_oneof![Just(0.0), 0.0f64..0.5]) {
        for space in [MetricSpace::euclidean(2).unwrap(), MetricSpace::l1(2).unwrap(), MetricSpace::linf(2).unwrap()] {
            let c = Point::xy(cx, 0.0);
            let mode = if frac == 0.0 { TripleMode::All } else { TripleMode::Separated { fraction: frac } };
            let b = beta_inf(&space, &pts, &c, r, mode).unwrap();
            prop_assert_eq!(b.beta, brute_beta(&space, &pts, &c, r, frac * r));
            if let Some([i, j, k]) = b.triple {
                prop_assert_eq!(triangle_defect(&space, &pts[i], &pts[j], &pts[k]).unwrap(), b.sup_defect);
            }
        }
    }

    #[test]
    fn beta_is_scale_invariant(pts in points(20), lambda in 0.1f64..10.0) {
        let e = MetricSpace::euclidean(2).unwrap();
        let scaled: Vec<Point> = pts.iter().map(|p| Point::xy(p.0[0] * lambda, p.0[1] * lambda)).collect();
        let b1 = beta_inf(&e, &pts, &Point::xy(0.0, 0.0), 1.5, TripleMode::All).unwrap().beta;
        let b2 = beta_inf(&e, &scaled, &Point::xy(0.0, 0.0), 1.5 * lambda, TripleMode::All).unwrap().beta;
        prop_assert!((b1 - b2).abs() <= 1e-7 * (1.0 + b1));
    }

    #[test]
    fn symmetric_defect_is_permutation_minimum(a in 0.0f64..5.0, b in 0.0f64..5.0, c in 0.0f64..5.0) {
        let v = symmetric_defect(a, b, c);
        let m = (a + b - c).min(a + c - b).min(b + c - a).max(0.0);
        prop_assert_eq!(v, m);
        prop_assert_eq!(v, symmetric_defect(c, a, b));
    }

    #[test]
    fn adding_points_never_lowers_the_supremum(pts in points(25), extra in points(5)) {
        let e = MetricSpace::euclidean(2).unwrap();
        let base = sup_symmetric_defect(&DistMatrix::new(&e, &pts), 0.0).value;
        let mut all = pts.clone();
        all.extend(extra);
        prop_assert!(sup_symmetric_defect(&DistMatrix::new(&e, &all), 0.0).value >= base);
    }
}

#[test]
fn straight_segment_is_flat_everywhere() {
    for space in [MetricSpace::euclidean(2).unwrap(), MetricSpace::l1(2).unwrap()] {
        let c = betascan_core::curve::generate_curve_in(&CurveSpec::Segment { length: 1.0 }, space).unwrap();
        let mr = multires_for_curve(&c, 10.0, 6).unwrap();
        let rep = beta_sum(&c, &mr, &[2.0, 2.5, 3.0], &BetaOptions::default()).unwrap();
        for s in &rep.sums {
            assert!(s.s_p.abs() <= 1e-10, "{s:?}");
        }
    }
}

/// A circular arc of angle `2 phi` and radius `R` has, with the chord `2 R sin(phi)`
/// between its ends and the midpoint at distance `2 R sin(phi / 2)` from each,
/// largest symmetric defect `4 R sin(phi / 2) - 2 R sin(phi)`.
#[test]
fn circle_ball_defect_matches_arc_formula() {
    let big_r = 1.0;
    let c = generate_curve(&CurveSpec::circle(big_r, 4096)).unwrap();
    let e = c.space();
    let center = Point::xy(big_r, 0.0);
    let r = 0.3;
    let pts: Vec<Point> = c.image_samples(1e-3).points;
    let b = beta_inf(e, &pts, &center, r, TripleMode::All).unwrap();
    // The ball meets the circle in the arc of half-angle phi with 2 R sin(phi / 2) = r.
    let phi = 2.0 * (r / (2.0 * big_r)).asin();
    let expected = 4.0 * big_r * (phi / 2.0).sin() - 2.0 * big_r * phi.sin();
    assert!((b.sup_defect - expected).abs() < 2e-4, "{} vs {expected}", b.sup_defect);
}

#[test]
fn large_ball_part_splits_the_sum() {
    let c = generate_curve(&CurveSpec::koch(25.0, 3)).unwrap();
    let mr = multires_for_curve(&c, 10.0, 4).unwrap();
    let all = beta_sum(&c, &mr, &[2.0, 3.0], &BetaOptions::default()).unwrap();
    let no_g0 = beta_sum(&c, &mr, &[2.0, 3.0], &BetaOptions { exclude_g0: true, ..Default::default() }).unwrap();
    for (a, b) in all.sums.iter().zip(&no_g0.sums) {
        assert!((a.s_p - (b.s_p + a.g0_part)).abs() <= 1e-12 * a.s_p.max(1.0));
        assert!((a.ratio - a.s_p / c.image_length()).abs() <= 1e-15);
    }
    assert!(beta_sum(&c, &mr, &[], &BetaOptions::default()).is_err());
    assert!(beta_sum(&c, &mr, &[-1.0], &BetaOptions::default()).is_err());
}

#[test]
fn arc_flatness_sees_corners() {
    let c = generate_curve(&CurveSpec::Polygon { vertices: vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0]], closed: false }).unwrap();
    let t = beta_tilde(&c, ParamInterval::new(0.0, 2.0), 0.01).unwrap();
    // Corner of a right angle: defect 2 - sqrt 2 over diameter sqrt 2.
    assert!((t.sup_defect - (2.0 - 2f64.sqrt())).abs() < 1e-12);
    assert!((t.diam - 2f64.sqrt()).abs() < 1e-12);
}
