//! Command-line runner for multiscale flatness experiments.
//!
//! Exit codes: 0 on success, 1 on invalid configuration or I/O failure,
//! 2 when a check fails in strict mode.

pub mod config;
pub mod pipeline;
pub mod plot;
pub mod report;
pub mod suites;

use std::ffi::OsString;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use betascan_core::beta::beta_sum;
use betascan_core::convexity::bad_set_experiment;
use betascan_core::cubes::run_lab;
use betascan_core::metric::SpaceKind;
use betascan_core::net::multires_for_curve;
use clap::{Args, Parser, Subcommand};

use crate::config::{Config, Mode};
use crate::pipeline::{analyze, bad_set_options, beta_options, build_curve, Analysis};
use crate::suites::{Verdict, Verdicts};

#[derive(Parser, Debug)]
#[command(name = "betascan", version, about = "Multiscale flatness statistics of curves in metric spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Flatness sums, per-ball table and plots for one curve.
    Analyze(Opts),
    /// Runs a verification suite on top of the analysis.
    Verify(Opts),
    /// Repeats the analysis over a parameter grid.
    Sweep(Opts),
    /// Writes the curve polyline as CSV and SVG.
    ExportCurve(Opts),
}

/// Every flag mirrors a configuration key; see `config::Config::set`.
#[derive(Args, Debug, Default)]
pub struct Opts {
    /// Flat `key = value` file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// segment, circle, koch, ell1-zigzag, spiral, polygon, heisenberg-lift or file.
    #[arg(long)]
    pub curve: Option<String>,
    /// Metric space override, e.g. euclidean(2), lp(2,3), l1(2), linf(2).
    #[arg(long)]
    pub space: Option<String>,
    #[arg(long)]
    pub radius: Option<String>,
    #[arg(long)]
    pub nverts: Option<String>,
    #[arg(long)]
    pub length: Option<String>,
    /// Koch angle in degrees.
    #[arg(long)]
    pub angle: Option<String>,
    #[arg(long)]
    pub depth: Option<String>,
    /// Zigzag refinement.
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub turns: Option<String>,
    #[arg(long)]
    pub lift_base: Option<String>,
    #[arg(long)]
    pub lift_steps: Option<String>,
    /// Polygon vertices `x,y;x,y;...`.
    #[arg(long)]
    pub vertices: Option<String>,
    #[arg(long)]
    pub closed: bool,
    #[arg(long)]
    pub curve_file: Option<String>,
    /// Ball inflation factor.
    #[arg(long = "A")]
    pub a: Option<String>,
    /// Exponent; repeat or comma-separate for several.
    #[arg(long)]
    pub p: Vec<String>,
    #[arg(long)]
    pub levels: Option<String>,
    #[arg(long)]
    pub sample_shift: Option<String>,
    /// all or separated.
    #[arg(long)]
    pub triples: Option<String>,
    #[arg(long)]
    pub separation: Option<String>,
    #[arg(long)]
    pub g0_cut: Option<String>,
    #[arg(long)]
    pub exclude_g0: bool,
    /// strict or diagnostic.
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long = "K")]
    pub k: Option<String>,
    #[arg(long)]
    pub eps_beta: Option<String>,
    #[arg(long = "C1")]
    pub c1: Option<String>,
    #[arg(long = "R")]
    pub r_sep: Option<String>,
    #[arg(long)]
    pub r_exp: Option<String>,
    #[arg(long)]
    pub q: Option<String>,
    /// Grid of c values; repeat or comma-separate.
    #[arg(long)]
    pub c: Vec<String>,
    #[arg(long = "C-r")]
    pub c_r: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// lemmas, alpha, orders, geodesic, net-flatness, heisenberg or all.
    #[arg(long)]
    pub suite: Option<String>,
    #[arg(long)]
    pub tuples: Option<String>,
    /// Extra per-ball columns: alpha, beta_net, beta_x, beta_h.
    #[arg(long)]
    pub extensions: Option<String>,
    /// Swept key.
    #[arg(long)]
    pub param: Option<String>,
    /// Swept values: `a..b` or a list.
    #[arg(long)]
    pub values: Option<String>,
    #[arg(long)]
    pub out: Option<String>,
}

impl Opts {
    fn pairs(&self) -> Vec<(&'static str, String)> {
        let mut v: Vec<(&'static str, String)> = Vec::new();
        let one = [
            ("curve", &self.curve),
            ("space", &self.space),
            ("radius", &self.radius),
            ("nverts", &self.nverts),
            ("length", &self.length),
            ("angle", &self.angle),
            ("depth", &self.depth),
            ("n", &self.n),
            ("turns", &self.turns),
            ("lift_base", &self.lift_base),
            ("lift_steps", &self.lift_steps),
            ("vertices", &self.vertices),
            ("curve_file", &self.curve_file),
            ("A", &self.a),
            ("levels", &self.levels),
            ("sample_shift", &self.sample_shift),
            ("triples", &self.triples),
            ("separation", &self.separation),
            ("g0_cut", &self.g0_cut),
            ("mode", &self.mode),
            ("K", &self.k),
            ("eps_beta", &self.eps_beta),
            ("C1", &self.c1),
            ("R", &self.r_sep),
            ("r_exp", &self.r_exp),
            ("q", &self.q),
            ("C_r", &self.c_r),
            ("seed", &self.seed),
            ("suite", &self.suite),
            ("tuples", &self.tuples),
            ("extensions", &self.extensions),
            ("param", &self.param),
            ("values", &self.values),
            ("out", &self.out),
        ];
        for (k, val) in one {
            if let Some(x) = val {
                v.push((k, x.clone()));
            }
        }
        if !self.p.is_empty() {
            v.push(("p", self.p.join(",")));
        }
        if !self.c.is_empty() {
            v.push(("c", self.c.join(",")));
        }
        if self.closed {
            v.push(("closed", "true".into()));
        }
        if self.exclude_g0 {
            v.push(("exclude_g0", "true".into()));
        }
        v
    }

    /// Defaults, then the file, then the flags.
    pub fn resolve(&self) -> Result<Config> {
        let mut cfg = Config::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        for (k, v) in self.pairs() {
            cfg.set(k, &v).with_context(|| format!("--{k}"))?;
        }
        cfg.finalize()?;
        Ok(cfg)
    }
}

/// Outcome of a successful run.
#[derive(Debug)]
pub struct Outcome {
    pub verdicts: Verdicts,
    pub strict: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.strict && self.verdicts.values().any(|v| !v.passed()) {
            2
        } else {
            0
        }
    }
}

/// Caps rayon workers from `BETASCAN_THREADS`.
pub fn init_threads() -> Result<()> {
    let Ok(s) = std::env::var("BETASCAN_THREADS") else { return Ok(()) };
    let n: usize = s.trim().parse().ok().filter(|&n| n > 0).with_context(|| format!("BETASCAN_THREADS must be a positive integer, got {s:?}"))?;
    #[cfg(feature = "parallel")]
    {
        // A pool may already exist when running in-process more than once.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

/// Parses arguments, runs and maps the result to an exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match init_threads().and_then(|_| execute(&cli.command)) {
        Ok(o) => o.exit_code(),
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

pub fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Analyze(o) => cmd_analyze(&o.resolve()?),
        Command::Verify(o) => cmd_verify(&o.resolve()?),
        Command::Sweep(o) => cmd_sweep(&o.resolve()?),
        Command::ExportCurve(o) => cmd_export(&o.resolve()?),
    }
}

fn print_summary(an: &Analysis, verdicts: &Verdicts) {
    println!(
        "{}: length {:.6}, diam {:.6}, {} balls on levels {}..={}",
        an.curve.label(),
        an.curve.image_length(),
        an.curve.diam(),
        an.mr.family.len(),
        an.mr.family.n_min,
        an.mr.family.n_max
    );
    for s in &an.flat.sums {
        println!("  S_{} = {:.6e}  ratio {:.6e}  large-ball part {:.6e}", s.p, s.s_p, s.ratio, s.g0_part);
    }
    print_verdicts(verdicts);
}

fn print_verdicts(verdicts: &Verdicts) {
    for (name, v) in verdicts {
        let margin = v.margin.map_or(String::new(), |m| format!(" margin {m:.3e}"));
        let note = if v.note.is_empty() { String::new() } else { format!(" ({})", v.note) };
        println!("  {:4} {name} [{} checked]{margin}{note}", v.status, v.checked);
    }
}

fn cmd_analyze(cfg: &Config) -> Result<Outcome> {
    let an = analyze(cfg)?;
    let verdicts = suites::net_verdicts(&an);
    report::write_analysis(cfg, &an, &verdicts)?;
    print_summary(&an, &verdicts);
    Ok(Outcome { verdicts, strict: cfg.mode == Mode::Strict })
}

const SUITES: [&str; 7] = ["lemmas", "alpha", "orders", "geodesic", "net-flatness", "heisenberg", "all"];

fn cmd_verify(cfg: &Config) -> Result<Outcome> {
    let suite = cfg.suite.as_str();
    if !SUITES.contains(&suite) {
        bail!("unknown suite {suite:?}; expected one of {}", SUITES.join(", "));
    }
    let all = suite == "all";
    let an = analyze(cfg)?;
    let mut v = suites::net_verdicts(&an);
    let out = &cfg.out;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    if all || suite == "lemmas" {
        let lab = run_lab(&an.curve, &an.mr, &an.flat, &cfg.lab())?;
        report::write_lab_csv(&out.join("lab_families.csv"), &lab)?;
        v.extend(suites::lemma_verdicts(&lab));
    }
    if all || suite == "alpha" {
        let checks = suites::alpha_checks(&an, cfg.a, cfg.sample_shift)?;
        v.insert("alpha_constant".into(), suites::alpha_verdict(&checks));
    }
    if all || suite == "orders" {
        v.extend(suites::order_verdicts(&suites::order_checks(&an, cfg.sample_shift)));
    }
    if all || suite == "geodesic" {
        v.extend(suites::geodesic_verdicts(&suites::geodesic_trials(cfg.tuples, cfg.seed)?));
    }
    if (all || suite == "net-flatness") && an.curve.space().is_normed() {
        let rows = suites::net_flatness(&an, cfg.sample_shift)?;
        let mut w = csv::Writer::from_path(out.join("net_flatness.csv"))?;
        w.write_record(["ball_id", "beta_net", "certified", "beta_line"])?;
        for r in &rows {
            let b = &an.mr.family.balls[r.ball];
            w.write_record([b.id(), format!("{:?}", r.beta_net), r.certified.to_string(), format!("{:?}", r.beta_line)])?;
        }
        w.flush()?;
        v.insert("net_flatness_constant".into(), suites::net_flatness_verdict(&rows, 200));
    } else if suite == "net-flatness" {
        bail!("the net-flatness suite needs a normed space, got {}", an.curve.space());
    }
    if all || suite == "heisenberg" {
        let rows = suites::heisenberg_triples(&[0.2, 0.1, 0.05], cfg.q, cfg.seed)?;
        let mut w = csv::Writer::from_path(out.join("heisenberg_triples.csv"))?;
        w.write_record(["rho", "beta_net", "beta_h", "ratio"])?;
        for r in &rows {
            w.write_record([r.rho, r.beta_net, r.beta_h, r.ratio].map(|x| format!("{x:?}")))?;
        }
        w.flush()?;
        v.insert("heisenberg_contrast".into(), suites::contrast_verdict(&rows));
        if let Some(bad) = &an.bad_set {
            let fr: Vec<f64> = bad.points.iter().map(|p| p.fraction).collect();
            let note = format!("long-curve margin {:.3}", bad.long_curve_margin);
            v.insert("bad_set_monotone".into(), Verdict::new(suites::monotone_fractions(&fr), None, fr.len(), note));
        }
    }
    report::write_analysis(cfg, &an, &v)?;
    print_summary(&an, &v);
    Ok(Outcome { verdicts: v, strict: cfg.mode == Mode::Strict })
}

/// Rows of a sweep, in value order then exponent order.
pub fn sweep_rows(cfg: &Config) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let param = cfg.sweep_param.as_deref().context("sweep needs param")?;
    if cfg.sweep_values.is_empty() {
        bail!("empty sweep grid");
    }
    let f = |x: f64| format!("{x:?}");
    if param == "c" {
        let mut c = cfg.clone();
        c.c_grid = cfg.sweep_values.clone();
        c.validate()?;
        let curve = build_curve(&c)?;
        if !matches!(curve.space().kind(), SpaceKind::Heisenberg) {
            bail!("sweeping c runs the bad-set experiment, which needs a Heisenberg curve");
        }
        let mr = multires_for_curve(&curve, c.a, c.levels)?;
        let bad = bad_set_experiment(&curve, &mr, &bad_set_options(&c))?;
        let header = ["c", "fraction", "mass", "members", "uncertain"].map(String::from).to_vec();
        let rows = bad.points.iter().map(|p| vec![f(p.c), f(p.fraction), f(p.mass), p.members.to_string(), p.uncertain.to_string()]).collect();
        return Ok((header, rows));
    }
    let header = ["param", "value", "p", "length", "diam", "balls", "S_p", "ratio", "G0_part"].map(String::from).to_vec();
    let mut rows = Vec::new();
    for &value in &cfg.sweep_values {
        let mut c = cfg.clone();
        c.set(param, &format!("{value}")).with_context(|| format!("sweeping {param}"))?;
        c.finalize()?;
        let curve = build_curve(&c)?;
        let mr = multires_for_curve(&curve, c.a, c.levels)?;
        let rep = beta_sum(&curve, &mr, &c.p, &beta_options(&c))?;
        for s in &rep.sums {
            rows.push(vec![
                param.to_string(),
                format!("{value}"),
                format!("{}", s.p),
                f(rep.image_length),
                f(rep.diam),
                mr.family.len().to_string(),
                f(s.s_p),
                f(s.ratio),
                f(s.g0_part),
            ]);
        }
    }
    Ok((header, rows))
}

fn cmd_sweep(cfg: &Config) -> Result<Outcome> {
    let (header, rows) = sweep_rows(cfg)?;
    std::fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    let mut w = csv::Writer::from_path(cfg.out.join("sweep.csv"))?;
    w.write_record(&header)?;
    for r in &rows {
        w.write_record(r)?;
    }
    w.flush()?;
    let parse = |s: &str| s.parse::<f64>().unwrap_or(f64::NAN);
    let svg = if header[0] == "c" {
        let pts = rows.iter().map(|r| (parse(&r[0]), parse(&r[1]))).collect();
        plot::line_chart("Bad-set fraction", "c (log scale)", "fraction of M_r mass", &[("fraction".into(), pts)], true)
    } else {
        let series: Vec<(String, Vec<(f64, f64)>)> = cfg
            .p
            .iter()
            .map(|p| {
                let key = format!("{p}");
                let pts = rows.iter().filter(|r| r[2] == key).map(|r| (parse(&r[1]), parse(&r[7]))).collect();
                (format!("p = {p}"), pts)
            })
            .collect();
        plot::line_chart("S_p / length", &header_label(cfg), "S_p / length", &series, false)
    };
    report::write(&cfg.out.join("sweep.svg"), &svg)?;
    println!("{} rows written to {}", rows.len(), cfg.out.join("sweep.csv").display());
    Ok(Outcome { verdicts: Verdicts::new(), strict: false })
}

fn header_label(cfg: &Config) -> String {
    cfg.sweep_param.clone().unwrap_or_default()
}

fn cmd_export(cfg: &Config) -> Result<Outcome> {
    let curve = build_curve(cfg)?;
    std::fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    let path = cfg.out.join("curve.csv");
    let file = std::fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?;
    curve.write_csv(std::io::BufWriter::new(file))?;
    let pts: Vec<(f64, f64)> = curve.polyline().iter().map(|p| (p.0[0], p.0.get(1).copied().unwrap_or(0.0))).collect();
    report::write(&cfg.out.join("curve.svg"), &plot::curve_plot(curve.label(), &pts))?;
    println!("{}: length {:.6}, diam {:.6}, written to {}", curve.label(), curve.image_length(), curve.diam(), path.display());
    Ok(Outcome { verdicts: Verdicts::new(), strict: false })
}
