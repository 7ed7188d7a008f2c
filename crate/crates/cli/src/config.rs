//! Experiment configuration: defaults, a flat `key = value` file, then
//! command-line overrides, all applied through [`Config::set`].

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use betascan_core::beta::TripleMode;
use betascan_core::cubes::{default_separation, LabConfig};
use betascan_core::curve::CurveSpec;
use betascan_core::MetricSpace;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Strict,
    Diagnostic,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Strict => "strict",
            Mode::Diagnostic => "diagnostic",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Config {
    pub curve: String,
    /// Overrides the curve family's default space, e.g. `lp(2,3)`.
    pub space: Option<String>,
    pub radius: f64,
    pub nverts: usize,
    pub length: f64,
    pub angle: f64,
    pub depth: u32,
    pub n: u32,
    pub turns: f64,
    /// Planar curve lifted for `heisenberg-lift`.
    pub lift_base: String,
    pub lift_steps: usize,
    /// Polygon vertices as `x,y;x,y;...`.
    pub vertices: Option<String>,
    pub closed: bool,
    pub curve_file: Option<PathBuf>,
    #[serde(rename = "A")]
    pub a: f64,
    pub p: Vec<f64>,
    pub levels: i32,
    pub sample_shift: i32,
    pub triples: String,
    pub separation: f64,
    pub g0_cut: f64,
    pub exclude_g0: bool,
    pub mode: Mode,
    #[serde(rename = "K")]
    pub k: u32,
    pub eps_beta: f64,
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "R")]
    pub r_sep: f64,
    pub r_exp: f64,
    pub q: f64,
    pub c_grid: Vec<f64>,
    #[serde(rename = "C_r")]
    pub c_r: f64,
    pub seed: u64,
    pub suite: String,
    pub tuples: usize,
    pub extensions: Vec<String>,
    pub sweep_param: Option<String>,
    pub sweep_values: Vec<f64>,
    pub out: PathBuf,
    #[serde(skip)]
    k_set: bool,
    #[serde(skip)]
    r_set: bool,
}

impl Default for Config {
    fn default() -> Self {
        let lab = LabConfig::strict();
        Config {
            curve: "segment".into(),
            space: None,
            radius: 1.0,
            nverts: 256,
            length: 1.0,
            angle: 25.0,
            depth: 4,
            n: 4,
            turns: 3.0,
            lift_base: "circle".into(),
            lift_steps: 4096,
            vertices: None,
            closed: false,
            curve_file: None,
            a: 10.0,
            p: vec![2.0, 2.5],
            levels: betascan_core::net::DEFAULT_LEVELS,
            sample_shift: 3,
            triples: "all".into(),
            separation: 0.25,
            g0_cut: 0.1,
            exclude_g0: false,
            mode: Mode::Strict,
            k: lab.k,
            eps_beta: lab.eps_beta,
            c1: lab.c1,
            r_sep: lab.r_sep,
            r_exp: 3.5,
            q: 3.0,
            c_grid: vec![0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0],
            c_r: 10.0,
            seed: 0x5eed,
            suite: "lemmas".into(),
            tuples: 1000,
            extensions: Vec::new(),
            sweep_param: None,
            sweep_values: Vec::new(),
            out: PathBuf::from("betascan-out"),
            k_set: false,
            r_set: false,
        }
    }
}

pub const EXTENSIONS: [&str; 4] = ["alpha", "beta_net", "beta_x", "beta_h"];

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().ok().with_context(|| format!("invalid value {v:?} for {key}"))
}

fn list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').filter(|s| !s.trim().is_empty()).map(|s| num(key, s)).collect()
}

fn flag(key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "true" | "yes" | "1" | "" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => bail!("invalid value {v:?} for {key}"),
    }
}

/// `a..b` (inclusive integer range) or a comma-separated list.
pub fn parse_values(key: &str, v: &str) -> Result<Vec<f64>> {
    if let Some((a, b)) = v.split_once("..") {
        let (a, b): (i64, i64) = (num(key, a)?, num(key, b.trim_start_matches('='))?);
        return Ok((a..=b).map(|x| x as f64).collect());
    }
    list(key, v)
}

impl Config {
    /// Applies one setting. Keys are case-sensitive for the paper symbols
    /// (`A`, `K`, `C1`, `R`, `C_r`); dashes and underscores are interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let v = value.trim();
        match key.as_str() {
            "curve" => self.curve = v.to_string(),
            "space" => self.space = Some(v.to_string()),
            "radius" => self.radius = num(&key, v)?,
            "nverts" => self.nverts = num(&key, v)?,
            "length" => self.length = num(&key, v)?,
            "angle" => self.angle = num(&key, v)?,
            "depth" => self.depth = num(&key, v)?,
            "n" => self.n = num(&key, v)?,
            "turns" => self.turns = num(&key, v)?,
            "lift_base" => self.lift_base = v.to_string(),
            "lift_steps" => self.lift_steps = num(&key, v)?,
            "vertices" => self.vertices = Some(v.to_string()),
            "closed" => self.closed = flag(&key, v)?,
            "curve_file" => self.curve_file = Some(PathBuf::from(v)),
            "A" => self.a = num(&key, v)?,
            "p" => self.p = list(&key, v)?,
            "levels" => self.levels = num(&key, v)?,
            "sample_shift" => self.sample_shift = num(&key, v)?,
            "triples" => self.triples = v.to_string(),
            "separation" => self.separation = num(&key, v)?,
            "g0_cut" => self.g0_cut = num(&key, v)?,
            "exclude_g0" => self.exclude_g0 = flag(&key, v)?,
            "mode" => {
                self.mode = match v {
                    "strict" => Mode::Strict,
                    "diagnostic" => Mode::Diagnostic,
                    _ => bail!("mode must be strict or diagnostic, got {v:?}"),
                }
            }
            "K" => {
                self.k = num(&key, v)?;
                self.k_set = true;
            }
            "eps_beta" => self.eps_beta = num(&key, v)?,
            "C1" => self.c1 = num(&key, v)?,
            "R" => {
                self.r_sep = num(&key, v)?;
                self.r_set = true;
            }
            "r_exp" => self.r_exp = num(&key, v)?,
            "q" => self.q = num(&key, v)?,
            "c" | "c_grid" => self.c_grid = list(&key, v)?,
            "C_r" => self.c_r = num(&key, v)?,
            "seed" => self.seed = num(&key, v)?,
            "suite" => self.suite = v.to_string(),
            "tuples" => self.tuples = num(&key, v)?,
            "extensions" => {
                self.extensions = v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
                if let Some(bad) = self.extensions.iter().find(|e| !EXTENSIONS.contains(&e.as_str())) {
                    bail!("unknown extension {bad:?}; expected one of {}", EXTENSIONS.join(", "));
                }
            }
            "param" | "sweep_param" => self.sweep_param = Some(v.to_string()),
            "values" | "sweep_values" => self.sweep_values = parse_values(&key, v)?,
            "out" => self.out = PathBuf::from(v),
            _ => bail!("unknown configuration key {key:?}"),
        }
        Ok(())
    }

    /// Reads `key = value` lines; `#` starts a comment.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        self.apply_text(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').with_context(|| format!("line {}: expected key = value", no + 1))?;
            self.set(k, v).with_context(|| format!("line {}", no + 1))?;
        }
        Ok(())
    }

    /// Fills mode-dependent defaults and checks the invariants.
    pub fn finalize(&mut self) -> Result<()> {
        if !self.k_set {
            self.k = match self.mode {
                Mode::Strict => LabConfig::strict().k,
                Mode::Diagnostic => LabConfig::diagnostic().k,
            };
        }
        if !self.r_set {
            self.r_sep = default_separation(self.k);
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.a > 1.0) {
            bail!("A must exceed 1, got {}", self.a);
        }
        if self.p.is_empty() || self.p.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            bail!("every p must be positive");
        }
        if self.levels < 0 || self.levels > 24 {
            bail!("levels must lie in 0..=24, got {}", self.levels);
        }
        if !(0..=12).contains(&self.sample_shift) {
            bail!("sample_shift must lie in 0..=12");
        }
        if !matches!(self.triples.as_str(), "all" | "separated") {
            bail!("triples must be all or separated, got {:?}", self.triples);
        }
        if !(self.separation > 0.0 && self.separation < 2.0) {
            bail!("separation must lie in (0, 2)");
        }
        if !(self.g0_cut > 0.0) {
            bail!("g0_cut must be positive");
        }
        if self.c_grid.is_empty() || self.c_grid.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
            bail!("the c grid must be non-empty and positive");
        }
        if self.c_grid.windows(2).any(|w| w[1] <= w[0]) {
            bail!("the c grid must be increasing");
        }
        if !(self.q > 0.0 && self.r_exp > 0.0 && self.c_r > 0.0) {
            bail!("q, r_exp and C_r must be positive");
        }
        self.lab()
            .validate()
            .map_err(|e| anyhow::anyhow!("{e} (mode {}, K = {}, eps_beta = {}, C1 = {})", self.mode, self.k, self.eps_beta, self.c1))?;
        if let Some(s) = &self.space {
            s.parse::<MetricSpace>().map_err(|e| anyhow::anyhow!("space {s:?}: {e}"))?;
        }
        Ok(())
    }

    pub fn lab(&self) -> LabConfig {
        LabConfig {
            k: self.k,
            eps_beta: self.eps_beta,
            c1: self.c1,
            r_sep: self.r_sep,
            strict: self.mode == Mode::Strict,
            sample_shift: self.sample_shift,
            p: self.p[0],
        }
    }

    pub fn triple_mode(&self) -> TripleMode {
        match self.triples.as_str() {
            "separated" => TripleMode::Separated { fraction: self.separation },
            _ => TripleMode::All,
        }
    }

    /// Curve family from the configuration, or `None` for `curve = file`.
    pub fn curve_spec(&self) -> Result<Option<CurveSpec>> {
        let planar = |name: &str| -> Result<CurveSpec> {
            Ok(match name {
                "segment" => CurveSpec::Segment { length: self.length },
                "circle" => CurveSpec::circle(self.radius, self.nverts),
                "koch" => CurveSpec::koch(self.angle, self.depth),
                "ell1-zigzag" | "zigzag" => CurveSpec::zigzag(self.n),
                "spiral" => CurveSpec::Spiral { turns: self.turns, nverts: self.nverts },
                "polygon" => CurveSpec::Polygon { vertices: self.polygon()?, closed: self.closed },
                other => bail!("unknown curve {other:?}"),
            })
        };
        Ok(match self.curve.as_str() {
            "file" => None,
            "heisenberg-lift" | "lift" => Some(CurveSpec::lift(planar(&self.lift_base)?, self.lift_steps)),
            name => Some(planar(name)?),
        })
    }

    fn polygon(&self) -> Result<Vec<Vec<f64>>> {
        let v = self.vertices.as_deref().context("polygon curves need vertices = x,y;x,y;...")?;
        v.split(';').filter(|s| !s.trim().is_empty()).map(|pt| list("vertices", pt)).collect()
    }
}
