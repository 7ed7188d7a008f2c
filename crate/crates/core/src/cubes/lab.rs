use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::beta::{sup_ordered_defect, DistMatrix, FlatnessReport};
use crate::curve::{Curve, CurveSamples, ParamInterval};
use crate::error::{Error, Result};
use crate::metric::Point;
use crate::net::Multires;
use crate::par;

use super::build::{build_cubes, check_cubes, CubeFamily, CubeInvariants};
use super::intervals::{preimage, LoopSet};
use super::separation::{partition_separated, scale_class, ScaleClass};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabConfig {
    pub k: u32,
    pub eps_beta: f64,
    pub c1: f64,
    pub r_sep: f64,
    /// Strict runs refuse constants outside the admissible range.
    pub strict: bool,
    pub sample_shift: i32,
    /// Exponent of the non-flat sum.
    pub p: f64,
}

impl LabConfig {
    pub fn strict() -> Self {
        Self::with_k(18, true)
    }

    pub fn diagnostic() -> Self {
        Self::with_k(3, false)
    }

    pub fn with_k(k: u32, strict: bool) -> Self {
        LabConfig {
            k,
            eps_beta: 1.0 / 40.0,
            c1: 20.0,
            r_sep: default_separation(k),
            strict,
            sample_shift: 3,
            p: 2.0,
        }
    }

    /// Constant in the decomposition inequality.
    pub fn c_decomposition(&self) -> f64 {
        4.0 * self.eps_beta * self.eps_beta
    }

    /// Violated admissibility conditions on the constants.
    pub fn admissibility_issues(&self) -> Vec<String> {
        let mut out = Vec::new();
        let e2 = self.eps_beta * self.eps_beta;
        if 2f64.powi(-(self.k as i32)) > e2 / 100.0 {
            out.push(format!("2^-K = {} exceeds eps_beta^2 / 100 = {}", 2f64.powi(-(self.k as i32)), e2 / 100.0));
        }
        if 1.0 / e2 <= 60.0 * self.c1 {
            out.push(format!("eps_beta^-2 = {} does not exceed 60 C1 = {}", 1.0 / e2, 60.0 * self.c1));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || !(self.eps_beta > 0.0 && self.eps_beta < 1.0) || !(self.c1 > 0.0) || !(self.r_sep > 0.0) {
            return Err(Error::InvalidParameter("lab constants out of range".into()));
        }
        if self.strict {
            if let Some(issue) = self.admissibility_issues().into_iter().next() {
                return Err(Error::InvalidParameter(issue));
            }
        }
        Ok(())
    }
}

pub fn default_separation(k: u32) -> f64 {
    16f64.max(2f64.powi(k as i32 - 10))
}

/// Pass count and worst slack of one inequality over many instances.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckStats {
    pub checked: usize,
    pub passed: usize,
    /// Smallest `(rhs - lhs) / scale`; negative when some instance fails.
    pub worst_margin: Option<f64>,
}

impl CheckStats {
    fn record(&mut self, slack: f64, scale: f64, tol: f64) {
        self.checked += 1;
        if slack >= -tol * scale {
            self.passed += 1;
        }
        let m = if scale > 0.0 { slack / scale } else { slack };
        self.worst_margin = Some(self.worst_margin.map_or(m, |w| w.min(m)));
    }

    fn merge(&mut self, o: &CheckStats) {
        self.checked += o.checked;
        self.passed += o.passed;
        self.worst_margin = match (self.worst_margin, o.worst_margin) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
    }

    pub fn all_pass(&self) -> bool {
        self.passed == self.checked
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WeightStats {
    pub roots: usize,
    pub nodes: usize,
    /// Roots whose total mass reaches the root diameter.
    pub mass_ok: usize,
    /// Roots whose weight lives inside the root cube.
    pub support_ok: usize,
    pub max_conservation_error: f64,
    /// Largest pointwise sum of weights divided by `2^M`.
    pub pointwise_c: f64,
    /// Nodes with no curve inside, skipped.
    pub degenerate: usize,
}

impl WeightStats {
    fn merge(&mut self, o: &WeightStats) {
        self.roots += o.roots;
        self.nodes += o.nodes;
        self.mass_ok += o.mass_ok;
        self.support_ok += o.support_ok;
        self.max_conservation_error = self.max_conservation_error.max(o.max_conservation_error);
        self.pointwise_c = self.pointwise_c.max(o.pointwise_c);
        self.degenerate += o.degenerate;
    }
}

/// Arc of the filtration: a component of a cube's preimage meeting its ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub cube: usize,
    pub interval: ParamInterval,
    pub diam: f64,
    /// Largest ordered defect along the arc.
    pub sup_defect: f64,
    pub beta_tilde: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Flatness {
    /// The ball sees a tenth of the curve's diameter.
    Large,
    /// Some arc is much less flat than the ball; holds the witness arc.
    NonFlat(usize),
    Flat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub color: usize,
    pub class: ScaleClass,
    pub balls: usize,
    pub invariants: CubeInvariants,
    pub double_absorptions: usize,
    pub arcs: usize,
    pub duplicate_arcs: usize,
    pub non_flat: usize,
    pub flat: usize,
    pub large: usize,
    /// Ordered-defect bound on each non-flat witness arc by its children.
    pub telescoping: CheckStats,
    /// Type I children larger than `2^-KM diam(parent)`.
    pub oversized_children: usize,
    pub filler_pieces: f64,
    /// Sum of witness defects and its bound `2 length`.
    pub family_sum: f64,
    pub family_bound: f64,
    pub decomposition: CheckStats,
    pub weights: WeightStats,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabTotals {
    pub families: usize,
    pub cubes: usize,
    pub invariants: CubeInvariants,
    pub duplicate_arcs: usize,
    pub non_flat: usize,
    pub flat: usize,
    pub large: usize,
    pub telescoping: CheckStats,
    pub oversized_children: usize,
    pub family_sums_ok: usize,
    pub worst_family_ratio: f64,
    pub decomposition: CheckStats,
    pub weights: WeightStats,
    /// `sum beta^p diam` over non-flat balls divided by the image length.
    pub non_flat_sum_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabReport {
    pub config: LabConfig,
    pub p1: usize,
    pub class_counts: BTreeMap<String, usize>,
    pub admissibility_issues: Vec<String>,
    pub families: Vec<FamilyReport>,
    pub totals: LabTotals,
}

impl LabReport {
    /// Strict-mode failure: some flat cube misses the decomposition bound.
    pub fn strict_failure(&self) -> bool {
        self.config.strict && !self.totals.decomposition.all_pass()
    }
}

/// Per-ball flatness and partition data, cheap enough to report alone.
pub fn families_summary(curve: &Curve, mr: &Multires, report: &FlatnessReport, k: u32, r_sep: f64) -> (usize, BTreeMap<String, usize>) {
    let part = partition_separated(curve.space(), &mr.family, r_sep);
    let mut counts = BTreeMap::new();
    for rec in &report.records {
        if let Some(c) = scale_class(rec.beta, rec.level, k) {
            *counts.entry(format!("M{}", c.m)).or_insert(0) += 1;
        }
    }
    (part.p1, counts)
}

struct Context<'a> {
    curve: &'a Curve,
    mr: &'a Multires,
    report: &'a FlatnessReport,
    samples: Vec<CurveSamples>,
    cfg: &'a LabConfig,
}

/// Runs the cube construction and all checks on every separated scale
/// class of the family. `report` must come from the same family.
pub fn run_lab(curve: &Curve, mr: &Multires, report: &FlatnessReport, cfg: &LabConfig) -> Result<LabReport> {
    cfg.validate()?;
    if report.records.len() != mr.family.balls.len() {
        return Err(Error::InvalidParameter("flatness report does not match the family".into()));
    }
    let fam = &mr.family;
    let part = partition_separated(curve.space(), fam, cfg.r_sep);
    let mut groups: BTreeMap<(usize, ScaleClass), Vec<usize>> = BTreeMap::new();
    let mut class_counts = BTreeMap::new();
    for (bi, rec) in report.records.iter().enumerate() {
        if let Some(c) = scale_class(rec.beta, rec.level, cfg.k) {
            groups.entry((part.colors[bi], c)).or_default().push(bi);
            *class_counts.entry(format!("M{}", c.m)).or_insert(0) += 1;
        }
    }
    let samples = (fam.n_min..=fam.n_max).map(|n| curve.samples(2f64.powi(-(n + cfg.sample_shift)))).collect();
    let ctx = Context { curve, mr, report, samples, cfg };
    let keys: Vec<(usize, ScaleClass)> = groups.keys().copied().collect();
    let results = par::map_indexed(keys.len(), |g| ctx.family(keys[g], &groups[&keys[g]]));
    let mut families = Vec::with_capacity(results.len());
    let mut non_flat_balls = vec![false; fam.balls.len()];
    for (rep, nf) in results {
        for b in nf {
            non_flat_balls[b] = true;
        }
        families.push(rep);
    }
    let totals = totals(&families, report, &non_flat_balls, cfg.p, curve.image_length());
    Ok(LabReport {
        config: cfg.clone(),
        p1: part.p1,
        class_counts,
        admissibility_issues: cfg.admissibility_issues(),
        families,
        totals,
    })
}

fn totals(families: &[FamilyReport], report: &FlatnessReport, non_flat: &[bool], p: f64, image_length: f64) -> LabTotals {
    let mut t = LabTotals {
        families: families.len(),
        cubes: 0,
        invariants: CubeInvariants::default(),
        duplicate_arcs: 0,
        non_flat: 0,
        flat: 0,
        large: 0,
        telescoping: CheckStats::default(),
        oversized_children: 0,
        family_sums_ok: 0,
        worst_family_ratio: 0.0,
        decomposition: CheckStats::default(),
        weights: WeightStats::default(),
        non_flat_sum_ratio: 0.0,
    };
    for f in families {
        t.cubes += f.invariants.cubes;
        t.invariants.merge(&f.invariants);
        t.duplicate_arcs += f.duplicate_arcs;
        t.non_flat += f.non_flat;
        t.flat += f.flat;
        t.large += f.large;
        t.telescoping.merge(&f.telescoping);
        t.oversized_children += f.oversized_children;
        if f.family_sum <= f.family_bound {
            t.family_sums_ok += 1;
        }
        t.worst_family_ratio = t.worst_family_ratio.max(f.family_sum / f.family_bound);
        t.decomposition.merge(&f.decomposition);
        t.weights.merge(&f.weights);
    }
    let mut s = 0.0;
    for (r, &nf) in report.records.iter().zip(non_flat) {
        if nf {
            s += r.beta.powf(p) * r.diam;
        }
    }
    t.non_flat_sum_ratio = s / image_length;
    t
}

impl Context<'_> {
    fn level_samples(&self, level: i32) -> &CurveSamples {
        &self.samples[(level - self.mr.family.n_min) as usize]
    }

    fn points_of(&self, params: &[f64]) -> Vec<Point> {
        params.iter().map(|&t| self.curve.point_at(t)).collect()
    }

    fn set_diam(&self, set: &LoopSet, level: i32) -> f64 {
        let pts = self.points_of(&set.sample_params(self.level_samples(level)));
        DistMatrix::new(self.curve.space(), &pts).diam()
    }

    /// Points along an arc at the level spacing, endpoints included.
    fn arc_points(&self, arc: ParamInterval, level: i32) -> (Vec<f64>, Vec<Point>) {
        let h = self.level_samples(level).step;
        let n = ((arc.len() / h).ceil() as usize).max(1);
        let params: Vec<f64> = (0..=n).map(|j| arc.start + arc.len() * j as f64 / n as f64).collect();
        let pts = self.points_of(&params);
        (params, pts)
    }

    fn family(&self, (color, class): (usize, ScaleClass), members: &[usize]) -> (FamilyReport, Vec<usize>) {
        let fam = &self.mr.family;
        let km = self.cfg.k * class.m;
        let cap_factor = 2f64.powi(-(km.min(1000) as i32));
        let cf = build_cubes(self.curve, &self.samples, fam, members, km);
        let invariants = check_cubes(self.curve, &self.samples, fam, &cf);
        let l = self.curve.length();

        // Arcs of every cube.
        let mut arcs: Vec<Arc> = Vec::new();
        let mut cube_arcs: Vec<Vec<usize>> = vec![Vec::new(); cf.cubes.len()];
        for (qi, q) in cf.cubes.iter().enumerate() {
            let b = &fam.balls[q.ball];
            let core = preimage(self.curve, self.level_samples(q.level), &b.center, b.radius);
            for comp in q.set.components() {
                if !LoopSet::from_arc(l, comp).intersects(&core) {
                    continue;
                }
                let (params, pts) = self.arc_points(comp, q.level);
                let dm = DistMatrix::new(self.curve.space(), &pts);
                let diam = dm.diam();
                let sup = sup_ordered_defect(&dm, Some(&params)).value;
                let beta_tilde = if diam > 0.0 { (sup / diam).sqrt() } else { 0.0 };
                cube_arcs[qi].push(arcs.len());
                arcs.push(Arc { cube: qi, interval: comp, diam, sup_defect: sup, beta_tilde });
            }
        }

        // Flatness of each cube's ball.
        let eps = self.cfg.eps_beta;
        let mut flat = vec![Flatness::Flat; cf.cubes.len()];
        let mut non_flat_balls = Vec::new();
        for (qi, q) in cf.cubes.iter().enumerate() {
            let rec = &self.report.records[q.ball];
            flat[qi] = if rec.g0 {
                Flatness::Large
            } else {
                let witness = cube_arcs[qi]
                    .iter()
                    .copied()
                    .filter(|&a| arcs[a].beta_tilde > eps * rec.beta)
                    .max_by(|&a, &b| arcs[a].beta_tilde.total_cmp(&arcs[b].beta_tilde).then(b.cmp(&a)));
                match witness {
                    Some(a) => {
                        non_flat_balls.push(q.ball);
                        Flatness::NonFlat(a)
                    }
                    None => Flatness::Flat,
                }
            };
        }

        // Filtration: parent of an arc is the shortest strictly longer arc
        // containing it.
        let mut by_len: Vec<usize> = (0..arcs.len()).collect();
        by_len.sort_by(|&a, &b| arcs[b].interval.len().total_cmp(&arcs[a].interval.len()).then(a.cmp(&b)));
        let mut parent: Vec<Option<usize>> = vec![None; arcs.len()];
        let mut duplicate_arcs = 0;
        let tol = 1e-12 * l;
        for (pos, &a) in by_len.iter().enumerate() {
            for &b in by_len[..pos].iter().rev() {
                if arc_contains(l, arcs[b].interval, arcs[a].interval, tol) {
                    if (arcs[b].interval.len() - arcs[a].interval.len()).abs() <= tol {
                        duplicate_arcs += 1;
                    }
                    parent[a] = Some(b);
                    break;
                }
            }
        }
        let mut arc_children: Vec<Vec<usize>> = vec![Vec::new(); arcs.len()];
        for (a, p) in parent.iter().enumerate() {
            if let Some(p) = p {
                arc_children[*p].push(a);
            }
        }

        // Telescoping bound on witnesses and the family sum.
        let mut telescoping = CheckStats::default();
        let mut oversized_children = 0;
        let mut filler_pieces = 0.0;
        let mut family_sum = 0.0;
        for f in &flat {
            if let Flatness::NonFlat(w) = *f {
                let tau = &arcs[w];
                let cap = cap_factor * tau.diam / 2.0;
                let (sum, pieces) = self.child_chord_sum(tau, &arc_children[w], &arcs, cap);
                filler_pieces += pieces;
                oversized_children += arc_children[w].iter().filter(|&&c| arcs[c].diam > cap_factor * tau.diam).count();
                let ends = self.curve.space().dist(&self.curve.point_at(tau.interval.start), &self.curve.point_at(tau.interval.end));
                let rhs = 2.0 * (sum - ends);
                telescoping.record(rhs - tau.sup_defect, tau.diam, 1e-12);
                family_sum += tau.sup_defect;
            }
        }

        // Decomposition of flat cubes into flat subcubes and remainder.
        let in_delta: Vec<bool> = flat.iter().map(|f| *f == Flatness::Flat).collect();
        let delta_children: Vec<Vec<usize>> = (0..cf.cubes.len())
            .map(|q| if in_delta[q] { maximal_below(&cf, q, &in_delta) } else { Vec::new() })
            .collect();
        let diam: Vec<f64> = cf
            .cubes
            .iter()
            .enumerate()
            .map(|(q, c)| if in_delta[q] { self.set_diam(&c.set, c.level) } else { 0.0 })
            .collect();
        let remainder: Vec<Option<LoopSet>> = (0..cf.cubes.len())
            .map(|q| {
                in_delta[q].then(|| {
                    let kids = delta_children[q].iter().fold(LoopSet::empty(l), |acc, &c| acc.union(&cf.cubes[c].set));
                    cf.cubes[q].set.difference(&kids)
                })
            })
            .collect();
        let c_dec = self.cfg.c_decomposition();
        let mut decomposition = CheckStats::default();
        for q in (0..cf.cubes.len()).filter(|&q| in_delta[q]) {
            let beta = self.report.records[cf.cubes[q].ball].beta;
            let lhs = remainder[q].as_ref().unwrap().measure() + delta_children[q].iter().map(|&c| diam[c]).sum::<f64>();
            let rhs = (1.0 + c_dec * beta * beta) * diam[q];
            decomposition.record(lhs - rhs, diam[q], 1e-12);
        }

        let weights = weights(&cf, &in_delta, &delta_children, &diam, &remainder, class.m);
        let rep = FamilyReport {
            color,
            class,
            balls: members.len(),
            invariants,
            double_absorptions: cf.double_absorptions,
            arcs: arcs.len(),
            duplicate_arcs,
            non_flat: flat.iter().filter(|f| matches!(f, Flatness::NonFlat(_))).count(),
            flat: flat.iter().filter(|f| **f == Flatness::Flat).count(),
            large: flat.iter().filter(|f| **f == Flatness::Large).count(),
            telescoping,
            oversized_children,
            filler_pieces,
            family_sum,
            family_bound: 2.0 * l,
            decomposition,
            weights,
        };
        (rep, non_flat_balls)
    }

    /// Sum of endpoint distances over the children of `tau`: its type I
    /// child arcs plus filler pieces of length at most `cap` tiling the gaps.
    /// Filler pieces inside one segment of the polyline contribute their
    /// length exactly, so only pieces straddling a vertex are evaluated.
    fn child_chord_sum(&self, tau: &Arc, kids: &[usize], arcs: &[Arc], cap: f64) -> (f64, f64) {
        let l = self.curve.length();
        let space = self.curve.space();
        let start = tau.interval.start;
        let mut spans: Vec<(f64, f64)> = kids
            .iter()
            .map(|&c| {
                let iv = arcs[c].interval;
                let off = (iv.start - start).rem_euclid(l);
                (start + off, start + off + iv.len())
            })
            .collect();
        spans.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut sum = 0.0;
        let mut pieces = 0.0;
        let mut cur = start;
        for &(a, b) in &spans {
            if a > cur {
                let (s, k) = self.filler_sum(cur, a, cap);
                sum += s;
                pieces += k;
            }
            sum += space.dist(&self.curve.point_at(a), &self.curve.point_at(b));
            cur = cur.max(b);
        }
        if tau.interval.end > cur {
            let (s, k) = self.filler_sum(cur, tau.interval.end, cap);
            sum += s;
            pieces += k;
        }
        (sum, pieces)
    }

    fn filler_sum(&self, a: f64, b: f64, cap: f64) -> (f64, f64) {
        let len = b - a;
        let pieces = if cap > 0.0 { (len / cap).ceil().max(1.0) } else { f64::INFINITY };
        if !pieces.is_finite() {
            return (len, pieces);
        }
        let w = len / pieces;
        let l = self.curve.length();
        let vp = self.curve.vertex_params();
        let space = self.curve.space();
        let mut sum = len;
        let mut last_piece = -1.0;
        // Vertices inside (a, b), unrolled over the loop.
        let mut base = (a / l).floor() * l;
        while base < b {
            for &v in vp {
                let t = base + v;
                if t <= a || t >= b {
                    continue;
                }
                let k = ((t - a) / w).floor().min(pieces - 1.0);
                let (ps, pe) = (a + k * w, a + (k + 1.0) * w);
                if t <= ps || t >= pe || k == last_piece {
                    continue;
                }
                last_piece = k;
                let chord = space.dist(&self.curve.point_at(ps), &self.curve.point_at(pe));
                sum -= (pe - ps) - chord;
            }
            base += l;
        }
        (sum, pieces)
    }
}

fn arc_contains(l: f64, outer: ParamInterval, inner: ParamInterval, tol: f64) -> bool {
    if outer.len() >= l - tol {
        return true;
    }
    let off = (inner.start - outer.start).rem_euclid(l);
    let off = if off > l - tol { 0.0 } else { off };
    off + inner.len() <= outer.len() + tol
}

/// Maximal cubes of `delta` strictly below `q` in the cube tree.
fn maximal_below(cf: &CubeFamily, q: usize, in_delta: &[bool]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut stack: Vec<usize> = cf.cubes[q].children.clone();
    while let Some(c) = stack.pop() {
        if in_delta[c] {
            out.push(c);
        } else {
            stack.extend(cf.cubes[c].children.iter().copied());
        }
    }
    out.sort_unstable();
    out
}

/// Weight construction on every flat cube: the root gets its diameter, and
/// each node passes its weight to its flat subcubes in proportion to their
/// diameters and to its remainder in proportion to length.
fn weights(
    cf: &CubeFamily,
    in_delta: &[bool],
    kids: &[Vec<usize>],
    diam: &[f64],
    remainder: &[Option<LoopSet>],
    m: u32,
) -> WeightStats {
    let mut st = WeightStats::default();
    let mut pieces: Vec<(f64, f64, f64)> = Vec::new();
    for root in (0..cf.cubes.len()).filter(|&q| in_delta[q]) {
        st.roots += 1;
        let mut mass = 0.0;
        let mut support = true;
        let mut stack = vec![(root, diam[root])];
        while let Some((q, w)) = stack.pop() {
            st.nodes += 1;
            let rem = remainder[q].as_ref().unwrap();
            let r_len = rem.measure();
            let s = r_len + kids[q].iter().map(|&c| diam[c]).sum::<f64>();
            if !(s > 0.0) {
                st.degenerate += 1;
                continue;
            }
            let density = w / s;
            let mut passed = density * r_len;
            mass += density * r_len;
            if !cf.cubes[root].set.contains_set(rem) {
                support = false;
            }
            for &(a, b) in rem.intervals() {
                pieces.push((a, b, density));
            }
            for &c in &kids[q] {
                let wc = density * diam[c];
                passed += wc;
                stack.push((c, wc));
            }
            let err = (passed - w).abs() / w.max(f64::MIN_POSITIVE);
            st.max_conservation_error = st.max_conservation_error.max(err);
        }
        if mass >= diam[root] * (1.0 - 1e-12) {
            st.mass_ok += 1;
        }
        if support {
            st.support_ok += 1;
        }
    }
    st.pointwise_c = max_overlap(&pieces) / 2f64.powi(m.min(1000) as i32);
    st
}

/// Largest total density over any point, by a sweep over interval ends.
fn max_overlap(pieces: &[(f64, f64, f64)]) -> f64 {
    let mut ev: Vec<(f64, u8, f64)> = Vec::with_capacity(2 * pieces.len());
    for &(a, b, d) in pieces {
        ev.push((a, 0, d));
        ev.push((b, 1, d));
    }
    // Closings first at a shared point: pieces meeting at an endpoint do not
    // overlap on a set of positive length.
    ev.sort_by(|x, y| x.0.total_cmp(&y.0).then(y.1.cmp(&x.1)));
    let (mut cur, mut best) = (0.0f64, 0.0f64);
    for (_, kind, d) in ev {
        if kind == 0 {
            cur += d;
            best = best.max(cur);
        } else {
            cur -= d;
        }
    }
    best
}
