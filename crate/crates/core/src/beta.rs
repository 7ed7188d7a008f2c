//! Flatness coefficients from triangle defects and their weighted sums.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::curve::{Curve, CurveSamples, ParamInterval};
use crate::error::{Error, Result};
use crate::metric::{symmetric_defect, MetricSpace, Point};
use crate::net::Multires;
use crate::par;

/// Row-major matrix of pairwise distances.
#[derive(Clone, Debug)]
pub struct DistMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistMatrix {
    pub fn new<'a, I>(space: &MetricSpace, pts: I) -> Self
    where
        I: IntoIterator<Item = &'a Point>,
    {
        let pts: Vec<&Point> = pts.into_iter().collect();
        let n = pts.len();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = space.dist(pts[i], pts[j]);
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        DistMatrix { n, d }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.d[i * self.n..(i + 1) * self.n]
    }

    pub fn diam(&self) -> f64 {
        self.d.iter().fold(0.0, |m: f64, &x| m.max(x))
    }
}

/// Supremum of a defect together with a triple attaining it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectSup {
    pub value: f64,
    pub triple: Option<[usize; 3]>,
}

/// Largest symmetric defect over triples whose mutual distances are all at
/// least `min_sep`.
///
/// The defect of a triple never exceeds its shortest side, so pairs no
/// longer than the running best are skipped.
pub fn sup_symmetric_defect(dm: &DistMatrix, min_sep: f64) -> DefectSup {
    let n = dm.len();
    let mut best = DefectSup { value: 0.0, triple: None };
    if n < 3 {
        return best;
    }
    // Seed with the diametral pair, which usually carries a large defect.
    let (mut p, mut q, mut dpq) = (0, 1, -1.0);
    for i in 0..n {
        for (j, &v) in dm.row(i).iter().enumerate().skip(i + 1) {
            if v > dpq {
                (p, q, dpq) = (i, j, v);
            }
        }
    }
    if dpq >= min_sep {
        for k in 0..n {
            if k == p || k == q {
                continue;
            }
            let (a, b) = (dm.get(p, k), dm.get(q, k));
            if a < min_sep || b < min_sep {
                continue;
            }
            let v = symmetric_defect(dpq, a, b);
            if v > best.value {
                best = DefectSup { value: v, triple: Some(sorted3(p, q, k)) };
            }
        }
    }
    for i in 0..n {
        let ri = dm.row(i);
        for j in i + 1..n {
            let dij = ri[j];
            if dij <= best.value || dij < min_sep {
                continue;
            }
            let rj = dm.row(j);
            // Branch-free max first, then the first index reaching it.
            let defect = |a: f64, b: f64| if a < min_sep || b < min_sep { 0.0 } else { symmetric_defect(dij, a, b) };
            let (ra, rb) = (&ri[j + 1..], &rj[j + 1..]);
            let row_max = ra.iter().zip(rb).fold(0.0f64, |m, (&a, &b)| {
                let v = defect(a, b);
                if v > m { v } else { m }
            });
            if row_max > best.value {
                let k = ra.iter().zip(rb).position(|(&a, &b)| defect(a, b) == row_max).unwrap();
                best = DefectSup { value: row_max, triple: Some([i, j, j + 1 + k]) };
            }
        }
    }
    best
}

fn sorted3(a: usize, b: usize, c: usize) -> [usize; 3] {
    let mut t = [a, b, c];
    t.sort_unstable();
    t
}

/// Largest ordered defect `d(a,b) + d(b,c) - d(a,c)` over `a < b < c`.
///
/// With `params` given (curve parameters of the points at unit speed), pairs
/// whose parameter excess `(t_c - t_a) - d(a,c)` cannot beat the running best
/// are skipped, since that excess bounds every defect with those ends. The
/// remaining pairs are first bounded by a scan over every `COARSE`-th middle
/// point: moving `b` by parameter `s` changes `d(a,b) + d(b,c)` by at most `2s`.
pub fn sup_ordered_defect(dm: &DistMatrix, params: Option<&[f64]>) -> DefectSup {
    const COARSE: usize = 8;
    let n = dm.len();
    let mut best = DefectSup { value: 0.0, triple: None };
    let hmax = params.map_or(f64::INFINITY, |t| t.windows(2).fold(0.0, |m: f64, w| m.max(w[1] - w[0])));
    let slack = COARSE as f64 * hmax;
    for a in 0..n {
        let ra = dm.row(a);
        for c in (a + 2..n).rev() {
            let dac = ra[c];
            let rc = dm.row(c);
            if let Some(t) = params {
                let excess = (t[c] - t[a]) - dac;
                if excess <= best.value - 1e-12 * dac.max(1e-300) {
                    continue;
                }
                if c - a > 4 * COARSE {
                    let mut m = ra[c - 1] + rc[c - 1];
                    for b in (a + 1..c).step_by(COARSE) {
                        m = m.max(ra[b] + rc[b]);
                    }
                    if m + slack - dac <= best.value {
                        continue;
                    }
                }
            }
            let mut m = f64::NEG_INFINITY;
            let mut arg = a + 1;
            for b in a + 1..c {
                let v = ra[b] + rc[b];
                if v > m {
                    m = v;
                    arg = b;
                }
            }
            let v = m - dac;
            if v > best.value {
                best = DefectSup { value: v, triple: Some([a, arg, c]) };
            }
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum TripleMode {
    All,
    /// Only triples with mutual distances at least `fraction * r`.
    Separated { fraction: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaInf {
    pub beta: f64,
    pub sup_defect: f64,
    /// Indices into the input set of a triple attaining the supremum.
    pub triple: Option<[usize; 3]>,
    pub count: usize,
    pub diam: f64,
}

/// Flatness of `E` inside the closed ball `B(center, radius)`: the square
/// root of the largest triangle defect divided by the radius.
pub fn beta_inf(space: &MetricSpace, e: &[Point], center: &Point, radius: f64, mode: TripleMode) -> Result<BetaInf> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {radius}")));
    }
    space.check_point(center)?;
    let mut idx = Vec::new();
    for (i, p) in e.iter().enumerate() {
        space.check_point(p)?;
        if space.dist(p, center) <= radius {
            idx.push(i);
        }
    }
    let dm = DistMatrix::new(space, idx.iter().map(|&i| &e[i]));
    let sup = sup_symmetric_defect(&dm, min_separation(mode, radius));
    Ok(BetaInf {
        beta: (sup.value / radius).sqrt(),
        sup_defect: sup.value,
        triple: sup.triple.map(|t| [idx[t[0]], idx[t[1]], idx[t[2]]]),
        count: idx.len(),
        diam: dm.diam(),
    })
}

fn min_separation(mode: TripleMode, radius: f64) -> f64 {
    match mode {
        TripleMode::All => 0.0,
        TripleMode::Separated { fraction } => fraction * radius,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaTilde {
    pub beta: f64,
    pub sup_defect: f64,
    pub diam: f64,
}

/// Arc flatness: the largest ordered defect along the arc over its diameter,
/// square-rooted. Evaluated on points of the arc at spacing at most `step`.
pub fn beta_tilde(curve: &Curve, arc: ParamInterval, step: f64) -> Result<BetaTilde> {
    if !(arc.len() >= 0.0 && arc.start.is_finite() && arc.end.is_finite()) {
        return Err(Error::InvalidParameter("bad arc interval".into()));
    }
    if !(step > 0.0) {
        return Err(Error::InvalidParameter("step must be positive".into()));
    }
    let n = ((arc.len() / step).ceil() as usize).max(1);
    let params: Vec<f64> = (0..=n).map(|j| arc.start + arc.len() * j as f64 / n as f64).collect();
    let pts: Vec<Point> = params.iter().map(|&t| curve.point_at(t)).collect();
    Ok(beta_tilde_points(curve.space(), &pts, Some(&params)))
}

/// Arc flatness of an ordered point list.
pub fn beta_tilde_points(space: &MetricSpace, pts: &[Point], params: Option<&[f64]>) -> BetaTilde {
    let dm = DistMatrix::new(space, pts);
    let diam = dm.diam();
    let sup = sup_ordered_defect(&dm, params);
    let beta = if diam > 0.0 { (sup.value / diam).sqrt() } else { 0.0 };
    BetaTilde { beta, sup_defect: sup.value, diam }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaOptions {
    /// Per-ball samples are taken at spacing `2^-(n + sample_shift)`.
    pub sample_shift: i32,
    pub mode: TripleMode,
    /// Balls whose sampled diameter is at least `g0_cut * diam(curve)` are
    /// flagged as large.
    pub g0_cut: f64,
    pub exclude_g0: bool,
}

impl Default for BetaOptions {
    fn default() -> Self {
        BetaOptions { sample_shift: 3, mode: TripleMode::All, g0_cut: 0.1, exclude_g0: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallRecord {
    pub level: i32,
    pub index: usize,
    pub radius: f64,
    /// Diameter of the sampled part of the curve inside the ball.
    pub diam: f64,
    pub n_points: usize,
    pub beta: f64,
    pub sup_defect: f64,
    pub g0: bool,
}

impl BallRecord {
    pub fn id(&self) -> String {
        format!("{}:{}", self.level, self.index)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PSum {
    pub p: f64,
    pub s_p: f64,
    pub g0_part: f64,
    /// `s_p` over the length of the image.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatnessReport {
    pub image_length: f64,
    pub diam: f64,
    pub records: Vec<BallRecord>,
    pub sums: Vec<PSum>,
}

/// Per-level image samples used for the per-ball computations.
pub fn level_samples(curve: &Curve, n_min: i32, n_max: i32, shift: i32) -> Vec<CurveSamples> {
    (n_min..=n_max).map(|n| curve.image_samples(2f64.powi(-(n + shift)))).collect()
}

/// Computes the flatness of every ball of the family and the sums
/// `S_p = sum beta^p diam(B)` for each `p`.
pub fn beta_sum(curve: &Curve, mr: &Multires, p_list: &[f64], opts: &BetaOptions) -> Result<FlatnessReport> {
    if p_list.is_empty() || p_list.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
        return Err(Error::InvalidParameter("exponents must be positive".into()));
    }
    let space = curve.space();
    let fam = &mr.family;
    let samples = level_samples(curve, fam.n_min, fam.n_max, opts.sample_shift);
    let gamma_diam = curve.diam();
    let records = par::map_indexed(fam.balls.len(), |k| {
        let b = &fam.balls[k];
        let s = &samples[(b.level - fam.n_min) as usize];
        let idx = s.within(space, &b.center, b.radius);
        let dm = DistMatrix::new(space, idx.iter().map(|&i| &s.points[i]));
        let sup = sup_symmetric_defect(&dm, min_separation(opts.mode, b.radius));
        let diam = dm.diam();
        BallRecord {
            level: b.level,
            index: b.index,
            radius: b.radius,
            diam,
            n_points: idx.len(),
            beta: (sup.value / b.radius).sqrt(),
            sup_defect: sup.value,
            g0: diam >= opts.g0_cut * gamma_diam,
        }
    });
    let image_length = curve.image_length();
    let sums = p_list
        .iter()
        .map(|&p| {
            let (mut s, mut g) = (0.0, 0.0);
            for r in &records {
                let term = r.beta.powf(p) * r.diam;
                if r.g0 {
                    g += term;
                    if opts.exclude_g0 {
                        continue;
                    }
                }
                s += term;
            }
            PSum { p, s_p: s, g0_part: g, ratio: s / image_length }
        })
        .collect();
    Ok(FlatnessReport { image_length, diam: gamma_diam, records, sums })
}

impl FlatnessReport {
    pub fn sum_for(&self, p: f64) -> Option<&PSum> {
        self.sums.iter().find(|s| s.p == p)
    }

    /// Writes one row per ball; the defect term uses the first exponent.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let p = self.sums.first().map_or(2.0, |s| s.p);
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["level", "ball_id", "radius", "beta_inf", "beta_p_diam_term", "diam", "n_points", "g0"])?;
        for r in &self.records {
            wr.write_record([
                r.level.to_string(),
                r.id(),
                format!("{:?}", r.radius),
                format!("{:?}", r.beta),
                format!("{:?}", r.beta.powf(p) * r.diam),
                format!("{:?}", r.diam),
                r.n_points.to_string(),
                r.g0.to_string(),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }
}
