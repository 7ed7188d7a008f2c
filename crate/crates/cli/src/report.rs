//! JSON summary, CSV tables and plot files.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use betascan_core::convexity::BadSetReport;
use betascan_core::cubes::LabReport;
use serde_json::{json, Value};

use crate::config::Config;
use crate::pipeline::{Analysis, Extras};
use crate::plot;
use crate::suites::Verdicts;

/// Key for an exponent: shortest decimal form, e.g. `2` or `2.5`.
pub fn p_key(p: f64) -> String {
    format!("{p}")
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn summary(cfg: &Config, an: &Analysis, verdicts: &Verdicts) -> Value {
    let sums: BTreeMap<String, Value> = an
        .flat
        .sums
        .iter()
        .map(|s| (p_key(s.p), json!({ "S_p": s.s_p, "ratio": s.ratio, "G0_part": s.g0_part })))
        .collect();
    let fam = &an.mr.family;
    json!({
        "config": cfg,
        "curve": {
            "label": an.curve.label(),
            "space": an.curve.space().to_string(),
            "length": an.curve.image_length(),
            "loop_length": an.curve.length(),
            "diam": an.curve.diam(),
            "doubling_estimate": an.doubling,
        },
        "families": {
            "P1": an.p1,
            "class_counts": an.class_counts,
            "balls": fam.balls.len(),
            "large_balls": an.flat.records.iter().filter(|r| r.g0).count(),
            "levels": [fam.n_min, fam.n_max],
        },
        "sums": sums,
        "verdicts": verdicts,
    })
}

pub fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    write(path, &s)
}

pub fn write(path: &Path, s: &str) -> Result<()> {
    fs::write(path, s).with_context(|| format!("writing {}", path.display()))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))
}

/// One row per ball; `beta_p_diam_term` uses the first exponent. Extension
/// columns are empty when not computed.
pub fn write_balls_csv(path: &Path, an: &Analysis) -> Result<()> {
    let p = an.flat.sums.first().map_or(2.0, |s| s.p);
    let mut w = csv_writer(path)?;
    w.write_record([
        "level",
        "ball_id",
        "radius",
        "beta_inf",
        "beta_p_diam_term",
        "diam",
        "n_points",
        "g0",
        "alpha",
        "beta_net",
        "beta_x",
        "beta_h",
        "bad_set_ratio",
    ])?;
    let none = Extras::default();
    for (k, r) in an.flat.records.iter().enumerate() {
        let e = an.extras.get(k).unwrap_or(&none);
        w.write_record([
            r.level.to_string(),
            r.id(),
            num(r.radius),
            num(r.beta),
            num(r.beta.powf(p) * r.diam),
            num(r.diam),
            r.n_points.to_string(),
            r.g0.to_string(),
            opt(e.alpha),
            opt(e.beta_net),
            opt(e.beta_x),
            opt(e.beta_h),
            opt(e.bad_set_ratio),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_lab_csv(path: &Path, lab: &LabReport) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "color",
        "M",
        "i",
        "balls",
        "cubes",
        "arcs",
        "non_flat",
        "flat",
        "large",
        "telescoping_checked",
        "telescoping_passed",
        "telescoping_worst_margin",
        "family_sum",
        "family_bound",
        "decomposition_checked",
        "decomposition_passed",
        "decomposition_worst_margin",
        "weight_roots",
        "weight_nodes",
        "weight_max_conservation_error",
        "weight_pointwise_c",
    ])?;
    for f in &lab.families {
        w.write_record([
            f.color.to_string(),
            f.class.m.to_string(),
            f.class.i.to_string(),
            f.balls.to_string(),
            f.invariants.cubes.to_string(),
            f.arcs.to_string(),
            f.non_flat.to_string(),
            f.flat.to_string(),
            f.large.to_string(),
            f.telescoping.checked.to_string(),
            f.telescoping.passed.to_string(),
            opt(f.telescoping.worst_margin),
            num(f.family_sum),
            num(f.family_bound),
            f.decomposition.checked.to_string(),
            f.decomposition.passed.to_string(),
            opt(f.decomposition.worst_margin),
            f.weights.roots.to_string(),
            f.weights.nodes.to_string(),
            num(f.weights.max_conservation_error),
            num(f.weights.pointwise_c),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_badset_csv(path: &Path, bad: &BadSetReport) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["c", "fraction", "mass", "members", "uncertain"])?;
    for p in &bad.points {
        w.write_record([num(p.c), num(p.fraction), num(p.mass), p.members.to_string(), p.uncertain.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn badset_svg(bad: &BadSetReport) -> String {
    let pts: Vec<(f64, f64)> = bad.points.iter().map(|p| (p.c, p.fraction)).collect();
    plot::line_chart("Bad-set fraction", "c (log scale)", "fraction of M_r mass", &[("fraction".into(), pts)], true)
}

/// Per-level sums of `beta^2 diam(B)`.
pub fn scales_svg(an: &Analysis) -> String {
    let fam = &an.mr.family;
    let mut labels = Vec::new();
    let mut values = Vec::new();
    for n in fam.n_min..=fam.n_max {
        labels.push(n.to_string());
        values.push(an.flat.records.iter().filter(|r| r.level == n).map(|r| r.beta * r.beta * r.diam).sum());
    }
    plot::bar_chart("Flatness per scale", "level n", "sum of beta^2 diam(B)", &labels, &values)
}

/// `S_p / length` on a grid of exponents together with the configured ones.
pub fn sp_svg(cfg: &Config, an: &Analysis) -> String {
    let mut ps: Vec<f64> = (4..=16).map(|k| k as f64 * 0.25).collect();
    ps.extend(cfg.p.iter().copied());
    ps.sort_by(f64::total_cmp);
    ps.dedup();
    let len = an.curve.image_length();
    let pts: Vec<(f64, f64)> = ps
        .iter()
        .map(|&p| {
            let s: f64 = an.flat.records.iter().filter(|r| !(cfg.exclude_g0 && r.g0)).map(|r| r.beta.powf(p) * r.diam).sum();
            (p, s / len)
        })
        .collect();
    plot::line_chart("S_p / length", "p", "S_p / length", &[(an.curve.label().to_string(), pts)], false)
}

/// The analysis outputs shared by analyze and verify.
pub fn write_analysis(cfg: &Config, an: &Analysis, verdicts: &Verdicts) -> Result<()> {
    let out = &cfg.out;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write_json(&out.join("report.json"), &summary(cfg, an, verdicts))?;
    write_balls_csv(&out.join("balls.csv"), an)?;
    write(&out.join("scales.svg"), &scales_svg(an))?;
    write(&out.join("sp_curve.svg"), &sp_svg(cfg, an))?;
    if let Some(bad) = &an.bad_set {
        write_badset_csv(&out.join("badset.csv"), bad)?;
        write(&out.join("badset.svg"), &badset_svg(bad))?;
    }
    Ok(())
}
