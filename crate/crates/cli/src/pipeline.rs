//! Curve construction and the per-ball analysis shared by all subcommands.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::ops::Range;

use anyhow::{Context, Result};
use betascan_core::beta::{beta_sum, level_samples, BetaOptions, FlatnessReport};
use betascan_core::convexity::{bad_set_experiment, beta_banach, beta_heisenberg, BadSetOptions, BadSetReport};
use betascan_core::cubes::{families_summary, preimage};
use betascan_core::curve::{generate_curve_in, Curve, CurveSamples};
use betascan_core::metric::SpaceKind;
use betascan_core::net::{doubling_constant_estimate, multires_for_curve, Multires};
use betascan_core::order::{alpha_estimate_on_arcs, beta_net_linf, AlphaEstimate};
use betascan_core::{par, MetricSpace, Point};

use crate::config::Config;

pub fn build_curve(cfg: &Config) -> Result<Curve> {
    match cfg.curve_spec()? {
        None => {
            let path = cfg.curve_file.as_ref().context("curve = file needs curve_file")?;
            let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            Ok(Curve::read_csv(BufReader::new(f))?)
        }
        Some(spec) => {
            let space = match &cfg.space {
                Some(s) => s.parse::<MetricSpace>()?,
                None => spec.default_space(),
            };
            Ok(generate_curve_in(&spec, space)?)
        }
    }
}

/// Optional per-ball columns; `None` when not requested or not defined.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Extras {
    pub alpha: Option<f64>,
    pub beta_net: Option<f64>,
    pub beta_x: Option<f64>,
    pub beta_h: Option<f64>,
    /// `beta_net / beta_H^q`; the ball is bad for every `c` below it.
    pub bad_set_ratio: Option<f64>,
}

pub struct Analysis {
    pub curve: Curve,
    pub mr: Multires,
    pub flat: FlatnessReport,
    pub doubling: usize,
    pub p1: usize,
    pub class_counts: BTreeMap<String, usize>,
    pub extras: Vec<Extras>,
    pub bad_set: Option<BadSetReport>,
}

pub fn beta_options(cfg: &Config) -> BetaOptions {
    BetaOptions { sample_shift: cfg.sample_shift, mode: cfg.triple_mode(), g0_cut: cfg.g0_cut, exclude_g0: cfg.exclude_g0 }
}

pub fn bad_set_options(cfg: &Config) -> BadSetOptions {
    BadSetOptions {
        q: cfg.q,
        r_exp: cfg.r_exp,
        c_grid: cfg.c_grid.clone(),
        sample_shift: cfg.sample_shift,
        assumed_c_r: cfg.c_r,
        seed: cfg.seed,
    }
}

pub fn analyze(cfg: &Config) -> Result<Analysis> {
    let curve = build_curve(cfg)?;
    analyze_curve(cfg, curve)
}

pub fn analyze_curve(cfg: &Config, curve: Curve) -> Result<Analysis> {
    let mr = multires_for_curve(&curve, cfg.a, cfg.levels)?;
    let flat = beta_sum(&curve, &mr, &cfg.p, &beta_options(cfg))?;
    // Doubling estimate on the net six levels below the coarsest: cheap,
    // and still sees several scales.
    let level = mr.family.n_max.min(mr.family.n_min + 6);
    let pts: Vec<Point> = mr.nets.level(level).iter().map(|&i| mr.source.points[i].clone()).collect();
    let doubling = doubling_constant_estimate(curve.space(), &pts)?;
    let (p1, class_counts) = families_summary(&curve, &mr, &flat, cfg.k, cfg.r_sep);
    let heis = matches!(curve.space().kind(), SpaceKind::Heisenberg);
    let bad_set = if heis { Some(bad_set_experiment(&curve, &mr, &bad_set_options(cfg))?) } else { None };
    let extras = extras(cfg, &curve, &mr, &flat, bad_set.as_ref())?;
    Ok(Analysis { curve, mr, flat, doubling, p1, class_counts, extras, bad_set })
}

/// Loop samples per level at spacing `2^-(n + shift)`.
pub fn loop_samples(curve: &Curve, mr: &Multires, shift: i32) -> Vec<CurveSamples> {
    (mr.family.n_min..=mr.family.n_max).map(|n| curve.samples(2f64.powi(-(n + shift)))).collect()
}

/// Points of the curve in a ball listed arc by arc: each component of the
/// preimage contributes its end points (on the sphere, up to bisection) and
/// the loop samples between them.
pub fn ball_arcs(curve: &Curve, samples: &CurveSamples, center: &Point, radius: f64) -> (Vec<Point>, Vec<Range<usize>>) {
    let set = preimage(curve, samples, center, radius);
    let h = samples.step;
    let mut pts = Vec::new();
    let mut runs = Vec::new();
    for arc in set.components() {
        let start = pts.len();
        pts.push(curve.point_at(arc.start));
        let mut k = (arc.start / h).floor() as i64 + 1;
        while (k as f64) * h < arc.end {
            pts.push(curve.point_at(k as f64 * h));
            k += 1;
        }
        if arc.end > arc.start {
            pts.push(curve.point_at(arc.end));
        }
        runs.push(start..pts.len());
    }
    (pts, runs)
}

/// Interval-distortion estimate of one ball from its arcs.
pub fn ball_alpha(curve: &Curve, samples: &CurveSamples, center: &Point, radius: f64, beta: f64) -> betascan_core::Result<AlphaEstimate> {
    let (pts, runs) = ball_arcs(curve, samples, center, radius);
    alpha_estimate_on_arcs(curve.space(), &pts, &runs, center, radius, beta)
}

fn wants(cfg: &Config, name: &str) -> bool {
    cfg.extensions.iter().any(|e| e == name)
}

fn extras(cfg: &Config, curve: &Curve, mr: &Multires, flat: &FlatnessReport, bad: Option<&BadSetReport>) -> Result<Vec<Extras>> {
    let space = curve.space();
    let fam = &mr.family;
    let (alpha, net, bx, bh) = (wants(cfg, "alpha"), wants(cfg, "beta_net"), wants(cfg, "beta_x"), wants(cfg, "beta_h"));
    let bx = bx && space.is_normed();
    let bh = bh && bad.is_none() && matches!(space.kind(), SpaceKind::Heisenberg);
    let samples = if bx || bh { level_samples(curve, fam.n_min, fam.n_max, cfg.sample_shift) } else { Vec::new() };
    let loops = if alpha { loop_samples(curve, mr, cfg.sample_shift) } else { Vec::new() };
    let src = &mr.source.points;
    let out = par::map_indexed(fam.balls.len(), |k| -> Result<Extras> {
        let b = &fam.balls[k];
        let rec = &flat.records[k];
        let mut e = Extras::default();
        let pts: Vec<Point> = if samples.is_empty() {
            Vec::new()
        } else {
            let s = &samples[(b.level - fam.n_min) as usize];
            s.within(space, &b.center, b.radius).into_iter().map(|i| s.points[i].clone()).collect()
        };
        if alpha {
            let s = &loops[(b.level - fam.n_min) as usize];
            e.alpha = ball_alpha(curve, s, &b.center, b.radius, rec.beta).ok().map(|a| a.alpha_upper);
        }
        if net && bad.is_none() && b.level < fam.n_max {
            let next = mr.nets.level(b.level + 1);
            let pick = |r: f64| -> Vec<Point> {
                next.iter().filter(|&&i| space.dist(&src[i], &b.center) <= r).map(|&i| src[i].clone()).collect()
            };
            e.beta_net = Some(beta_net_linf(space, &pick(b.radius), &pick(4.0 * b.radius), b.radius)?.value);
        }
        if bx {
            e.beta_x = Some(beta_banach(space, &pts, b.radius)?.beta);
        }
        if bh {
            let seed = cfg.seed ^ ((b.level as i64 as u64) << 40) ^ b.index as u64;
            e.beta_h = Some(beta_heisenberg(&pts, b.radius, seed)?.beta);
        }
        Ok(e)
    });
    let mut out = out.into_iter().collect::<Result<Vec<_>>>()?;
    if let Some(bad) = bad {
        let pos: BTreeMap<(i32, usize), usize> = fam.balls.iter().enumerate().map(|(k, b)| ((b.level, b.index), k)).collect();
        for bb in &bad.balls {
            let e = &mut out[pos[&(bb.level, bb.index)]];
            e.beta_net = Some(bb.beta_net);
            e.beta_h = Some(bb.beta_h);
            let t = bb.beta_h.powf(cfg.q);
            e.bad_set_ratio = (t > 0.0).then(|| bb.beta_net / t);
        }
    }
    Ok(out)
}
