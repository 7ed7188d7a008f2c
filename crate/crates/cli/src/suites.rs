//! Checks behind the `verify` subcommand and the analyze-time net checks.

use std::collections::BTreeMap;

use anyhow::Result;
use betascan_core::beta::{level_samples, DistMatrix};
use betascan_core::convexity::{beta_banach, beta_heisenberg};
use betascan_core::cubes::LabReport;
use betascan_core::order::{alpha_regime_threshold, beta_net_linf, find_order_matrix, fit_linf_geodesic, order_violation};
use betascan_core::{par, Error, MetricSpace, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::pipeline::{ball_alpha, loop_samples, Analysis};

/// Outcome of one named check. `margin` is the worst normalised slack
/// (negative when failing) where one is meaningful.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub status: &'static str,
    pub margin: Option<f64>,
    pub checked: usize,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl Verdict {
    pub fn new(pass: bool, margin: Option<f64>, checked: usize, note: impl Into<String>) -> Verdict {
        Verdict { status: if pass { "pass" } else { "fail" }, margin, checked, note: note.into() }
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }
}

pub type Verdicts = BTreeMap<String, Verdict>;

const COVER_SAMPLE: usize = 4096;

/// Separation, covering and nesting of the nets behind the ball family.
pub fn net_verdicts(an: &Analysis) -> Verdicts {
    let space = an.curve.space();
    let src = &an.mr.source.points;
    let nets = &an.mr.nets;
    let stride = src.len().div_ceil(COVER_SAMPLE).max(1);
    let levels: Vec<(i32, Vec<usize>)> = nets.levels().map(|(n, v)| (n, v.to_vec())).collect();
    let per_level = par::map_indexed(levels.len(), |k| {
        let (n, idx) = &levels[k];
        let eps = 2f64.powi(-n);
        let mut sep = f64::INFINITY;
        for (a, &i) in idx.iter().enumerate() {
            for &j in &idx[a + 1..] {
                sep = sep.min(space.dist(&src[i], &src[j]));
            }
        }
        let mut cover: f64 = 0.0;
        for p in src.iter().step_by(stride) {
            let mut best = f64::INFINITY;
            for &i in idx {
                best = best.min(space.dist(p, &src[i]));
                if best <= eps {
                    break;
                }
            }
            cover = cover.max(best);
        }
        (sep / eps - 1.0, 1.0 - cover / eps)
    });
    let sep = per_level.iter().map(|x| x.0).fold(f64::INFINITY, f64::min);
    let cover = per_level.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
    let nested = levels.windows(2).all(|w| w[1].1.starts_with(&w[0].1));
    let mut v = Verdicts::new();
    let n = levels.len();
    v.insert("net_separation".into(), Verdict::new(sep > 0.0, finite(sep), n, ""));
    v.insert("net_covering".into(), Verdict::new(cover >= 0.0, finite(cover), n, format!("source sample stride {stride}")));
    v.insert("nested_nets".into(), Verdict::new(nested, None, n.saturating_sub(1), ""));
    v
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// Verdicts of the cube lab.
pub fn lemma_verdicts(lab: &LabReport) -> Verdicts {
    let t = &lab.totals;
    let w = &t.weights;
    let mut v = Verdicts::new();
    v.insert(
        "cube_invariants".into(),
        Verdict::new(t.invariants.ok(), None, t.cubes, format!("{} duplicate arcs", t.duplicate_arcs)),
    );
    v.insert(
        "telescoping_bound".into(),
        Verdict::new(
            t.telescoping.all_pass(),
            t.telescoping.worst_margin,
            t.telescoping.checked,
            format!("non-flat witnesses; {} oversized children", t.oversized_children),
        ),
    );
    v.insert(
        "family_sum_bound".into(),
        Verdict::new(
            t.family_sums_ok == t.families,
            Some(1.0 - t.worst_family_ratio),
            t.families,
            format!("worst family sum is {:.4} of twice the length", t.worst_family_ratio),
        ),
    );
    let flat_note = if t.decomposition.checked == 0 { "no flat cubes" } else { "flat cubes" };
    v.insert(
        "decomposition_inequality".into(),
        Verdict::new(t.decomposition.all_pass(), t.decomposition.worst_margin, t.decomposition.checked, flat_note),
    );
    v.insert("weight_mass".into(), Verdict::new(w.mass_ok == w.nodes, None, w.nodes, ""));
    v.insert("weight_support".into(), Verdict::new(w.support_ok == w.nodes, None, w.nodes, ""));
    v.insert(
        "weight_pointwise".into(),
        Verdict::new(w.pointwise_c.is_finite(), finite(w.pointwise_c), w.roots, "margin is the reported constant C"),
    );
    v.insert(
        "weight_conservation".into(),
        Verdict::new(w.max_conservation_error <= 1e-12, Some(1e-12 - w.max_conservation_error), w.nodes, ""),
    );
    if !lab.admissibility_issues.is_empty() {
        let note = lab.admissibility_issues.join("; ");
        v.insert("admissible_constants".into(), Verdict::new(!lab.config.strict, None, 1, note));
    }
    v
}

/// Per-ball outcome of the interval-distortion construction.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaCheck {
    pub level: i32,
    pub index: usize,
    pub beta: f64,
    pub diam: f64,
    /// `None` when the net had no order.
    pub eps: Option<f64>,
    pub bound: f64,
}

impl AlphaCheck {
    pub fn holds(&self) -> bool {
        self.eps.is_some_and(|e| e <= self.bound + 1e-12 * self.diam.max(1e-300))
    }
}

/// Runs the construction on every ball whose `beta^2` is below the regime
/// threshold for `a` and compares the distortion with `9 beta diam`.
pub fn alpha_checks(an: &Analysis, a: f64, sample_shift: i32) -> Result<Vec<AlphaCheck>> {
    let thr = alpha_regime_threshold(a);
    let fam = &an.mr.family;
    let picked: Vec<usize> = (0..fam.balls.len()).filter(|&k| an.flat.records[k].beta.powi(2) <= thr).collect();
    if picked.is_empty() {
        return Ok(Vec::new());
    }
    let samples = loop_samples(&an.curve, &an.mr, sample_shift);
    let out = par::map_indexed(picked.len(), |j| -> Result<AlphaCheck> {
        let k = picked[j];
        let (b, rec) = (&fam.balls[k], &an.flat.records[k]);
        let s = &samples[(b.level - fam.n_min) as usize];
        let eps = match ball_alpha(&an.curve, s, &b.center, b.radius, rec.beta) {
            Ok(e) => Some(e.eps),
            Err(Error::NoOrder) => None,
            Err(e) => return Err(e.into()),
        };
        Ok(AlphaCheck { level: b.level, index: b.index, beta: rec.beta, diam: rec.diam, eps, bound: 9.0 * rec.beta * rec.diam })
    });
    out.into_iter().collect()
}

pub fn alpha_verdict(checks: &[AlphaCheck]) -> Verdict {
    let fails = checks.iter().filter(|c| !c.holds()).count();
    let margin = checks
        .iter()
        .filter(|c| c.diam > 0.0)
        .map(|c| c.eps.map_or(f64::NEG_INFINITY, |e| (c.bound - e) / c.diam))
        .fold(f64::INFINITY, f64::min);
    let note = if checks.is_empty() { "no ball below the regime threshold".to_string() } else { format!("{fails} violations") };
    Verdict::new(fails == 0, finite(margin), checks.len(), note)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OrderStats {
    /// Sets for which an order was returned.
    pub ordered: usize,
    pub unordered: usize,
    /// Returned orders failing the exhaustive triple check.
    pub violations: usize,
}

impl OrderStats {
    pub fn record(&mut self, dm: &DistMatrix) {
        match find_order_matrix(dm) {
            Ok(o) => {
                self.ordered += 1;
                if order_violation(dm, &o.perm).is_some() {
                    self.violations += 1;
                }
            }
            Err(_) => self.unordered += 1,
        }
    }
}

/// Orders on the greedy `max(2 beta diam, diam / 64)`-nets of every ball,
/// each checked exhaustively.
pub fn order_checks(an: &Analysis, sample_shift: i32) -> OrderStats {
    let fam = &an.mr.family;
    let space = an.curve.space();
    let samples = level_samples(&an.curve, fam.n_min, fam.n_max, sample_shift);
    let per = par::map_indexed(fam.balls.len(), |k| {
        let (b, rec) = (&fam.balls[k], &an.flat.records[k]);
        let s = &samples[(b.level - fam.n_min) as usize];
        let pts: Vec<&Point> = s.within(space, &b.center, b.radius).into_iter().map(|i| &s.points[i]).collect();
        let sep = (2.0 * rec.beta * rec.diam).max(rec.diam / 64.0);
        let mut net: Vec<&Point> = Vec::new();
        for p in pts {
            if net.iter().all(|q| space.dist(p, q) > sep) {
                net.push(p);
            }
        }
        let mut st = OrderStats::default();
        st.record(&DistMatrix::new(space, net));
        st
    });
    let mut total = OrderStats::default();
    for s in per {
        total.ordered += s.ordered;
        total.unordered += s.unordered;
        total.violations += s.violations;
    }
    total
}

/// The equilateral triangle admits no order.
pub fn triangle_has_no_order() -> bool {
    let s = MetricSpace::euclidean(2).expect("valid");
    let pts = [Point::xy(0.0, 0.0), Point::xy(1.0, 0.0), Point::xy(0.5, 3f64.sqrt() / 2.0)];
    matches!(find_order_matrix(&DistMatrix::new(&s, &pts)), Err(Error::NoOrder))
}

pub fn order_verdicts(st: &OrderStats) -> Verdicts {
    let mut v = Verdicts::new();
    v.insert(
        "order_exhaustive_check".into(),
        Verdict::new(st.violations == 0, None, st.ordered, format!("{} nets without an order", st.unordered)),
    );
    v.insert("triangle_has_no_order".into(), Verdict::new(triangle_has_no_order(), None, 1, ""));
    v
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct GeodesicStats {
    pub drawn: usize,
    pub certified: usize,
    pub deviation_failures: usize,
    /// Largest `sup_deviation / (15 h)` over certified tuples with `h > 0`.
    pub worst_ratio: f64,
    pub max_waypoint_defect: f64,
}

/// A random ordered tuple in `linf^d`: points along a random direction with
/// gaps in `[r, 3r]`, each coordinate perturbed by at most `r / 2000`.
pub fn random_ordered_tuple(rng: &mut ChaCha8Rng, n: usize, d: usize, r: f64) -> Vec<Point> {
    let mut v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let lead = rng.gen_range(0..d);
    v[lead] = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let mut t = 0.0;
    (0..n)
        .map(|_| {
            t += rng.gen_range(r..3.0 * r);
            Point(v.iter().map(|c| c * t + rng.gen_range(-r / 2000.0..r / 2000.0)).collect())
        })
        .collect()
}

/// Draws tuples until `count` certified ones (defect below a 200th of the
/// separation) have been fitted.
pub fn geodesic_trials(count: usize, seed: u64) -> Result<GeodesicStats> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut st = GeodesicStats::default();
    while st.certified < count {
        let n = rng.gen_range(3..=12);
        let d = rng.gen_range(1..=8);
        let pts = random_ordered_tuple(&mut rng, n, d, 1.0);
        st.drawn += 1;
        let fit = fit_linf_geodesic(&pts)?;
        if !fit.certified {
            continue;
        }
        st.certified += 1;
        if fit.sup_deviation > 15.0 * fit.h + 1e-12 {
            st.deviation_failures += 1;
        }
        if fit.h > 0.0 {
            st.worst_ratio = st.worst_ratio.max(fit.sup_deviation / (15.0 * fit.h));
        }
        st.max_waypoint_defect = st.max_waypoint_defect.max(fit.waypoint_defect);
    }
    Ok(st)
}

pub fn geodesic_verdicts(st: &GeodesicStats) -> Verdicts {
    let mut v = Verdicts::new();
    v.insert(
        "geodesic_deviation".into(),
        Verdict::new(st.deviation_failures == 0, Some(1.0 - st.worst_ratio), st.certified, format!("{} tuples drawn", st.drawn)),
    );
    v.insert(
        "geodesic_waypoint_defect".into(),
        Verdict::new(st.max_waypoint_defect <= 1e-9, Some(1e-9 - st.max_waypoint_defect), st.certified, ""),
    );
    v
}

/// Net flatness against the squared Euclidean line flatness of one ball.
#[derive(Clone, Debug, PartialEq)]
pub struct NetFlatness {
    pub ball: usize,
    pub beta_net: f64,
    pub certified: bool,
    /// Line flatness of the curve samples in the ball.
    pub beta_line: f64,
}

/// `beta_net` and the line flatness for every ball above the finest level.
/// Needs a normed space.
pub fn net_flatness(an: &Analysis, sample_shift: i32) -> Result<Vec<NetFlatness>> {
    let fam = &an.mr.family;
    let space = an.curve.space();
    let src = &an.mr.source.points;
    let samples = level_samples(&an.curve, fam.n_min, fam.n_max, sample_shift);
    let picked: Vec<usize> = (0..fam.balls.len()).filter(|&k| fam.balls[k].level < fam.n_max).collect();
    let out = par::map_indexed(picked.len(), |j| -> Result<NetFlatness> {
        let k = picked[j];
        let b = &fam.balls[k];
        let next = an.mr.nets.level(b.level + 1);
        let pick = |r: f64| -> Vec<Point> {
            next.iter().filter(|&&i| space.dist(&src[i], &b.center) <= r).map(|&i| src[i].clone()).collect()
        };
        let nb = beta_net_linf(space, &pick(b.radius), &pick(4.0 * b.radius), b.radius)?;
        let s = &samples[(b.level - fam.n_min) as usize];
        let pts: Vec<Point> = s.within(space, &b.center, b.radius).into_iter().map(|i| s.points[i].clone()).collect();
        let line = beta_banach(space, &pts, b.radius)?;
        Ok(NetFlatness { ball: k, beta_net: nb.value, certified: nb.certified, beta_line: line.beta })
    });
    out.into_iter().collect()
}

/// Largest `beta_net / beta_line^2` over balls with positive line flatness.
pub fn calibrate(rows: &[&NetFlatness]) -> f64 {
    rows.iter().filter(|r| r.beta_line > 0.0).map(|r| r.beta_net / (r.beta_line * r.beta_line)).fold(0.0, f64::max)
}

/// Balls violating `beta_net <= c beta_line^2 + 1e-9`.
pub fn violations(rows: &[NetFlatness], c: f64) -> usize {
    rows.iter().filter(|r| r.beta_net > c * r.beta_line * r.beta_line + 1e-9).count()
}

/// Calibrates on `sample` evenly strided balls, then checks every ball at
/// 1.1 times the calibrated constant.
pub fn net_flatness_verdict(rows: &[NetFlatness], sample: usize) -> Verdict {
    let stride = rows.len().div_ceil(sample.max(1)).max(1);
    let cal: Vec<&NetFlatness> = rows.iter().step_by(stride).collect();
    let c = calibrate(&cal);
    let fails = violations(rows, 1.1 * c);
    Verdict::new(fails == 0, Some(c), rows.len(), format!("margin is the calibrated C; {fails} violations at 1.1 C"))
}

/// Net flatness, horizontal-line flatness and their ratio for the triple
/// `(0,0,0), (1,0,0), (0,0,rho^2)` in the ball of radius 2 about the origin.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TripleContrast {
    pub rho: f64,
    pub beta_net: f64,
    pub beta_h: f64,
    pub ratio: f64,
}

pub fn heisenberg_triples(rhos: &[f64], q: f64, seed: u64) -> Result<Vec<TripleContrast>> {
    let space = MetricSpace::heisenberg();
    rhos.iter()
        .map(|&rho| {
            let k = [Point(vec![0.0, 0.0, 0.0]), Point(vec![1.0, 0.0, 0.0]), Point(vec![0.0, 0.0, rho * rho])];
            let nb = beta_net_linf(&space, &k, &k, 2.0)?;
            let bh = beta_heisenberg(&k, 2.0, seed)?;
            Ok(TripleContrast { rho, beta_net: nb.value, beta_h: bh.beta, ratio: nb.value / bh.beta.powf(q) })
        })
        .collect()
}

/// Ratios strictly increase as `rho` decreases (`rhos` given decreasing).
pub fn contrast_verdict(rows: &[TripleContrast]) -> Verdict {
    let ok = rows.windows(2).all(|w| w[1].ratio > w[0].ratio);
    let margin = rows.windows(2).map(|w| w[1].ratio / w[0].ratio - 1.0).fold(f64::INFINITY, f64::min);
    Verdict::new(ok, finite(margin), rows.len(), "")
}

/// Fractions are exactly non-increasing in `c`.
pub fn monotone_fractions(fr: &[f64]) -> bool {
    fr.windows(2).all(|w| w[1] <= w[0])
}
