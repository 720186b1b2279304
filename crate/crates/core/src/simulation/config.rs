//! Experiment descriptions and their `key = value` / `[section]` text format.
//!
//! ```text
//! [experiment]
//! name = example2
//! target = v              # q | h | v | ks-residuals | bregman(s) | bregman-sym(s)
//! n_sim = 300
//! seed = 1
//! ci_level = 0.95         # optional
//!
//! [samples]
//! mode = continuous
//! x = gaussian1d(0,1.5)
//! y = gaussian1d(2,0.5)   # optional
//! n1 = 100
//! n2 = 200
//! n_list = 100,200,400    # optional: one cell per n with n1 = n2 = n
//!
//! [estimator]
//! r1 = 1
//! r2 = 1
//! epsilon = fixed(0.1)    # fixed(e) | theorem3(alpha,c) | scaled(a1,a2,...) | none
//! ```
//!
//! Unknown sections or keys are rejected.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::functional::FunctionalOrder;
use crate::inference::select_epsilon;
use crate::oracle::DistributionSpec;
use crate::sample::Mode;

/// How the bandwidth is chosen for each replication.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonRule {
    Fixed(f64),
    /// Hölder-rate choice from [`select_epsilon`] with `n = n1 + n2`.
    Theorem3 { alpha: f64, c: f64 },
    /// `ε = a / n1`.
    Scaled(f64),
    /// Exact coincidences (discrete mode).
    Exact,
}

impl EpsilonRule {
    pub fn resolve(&self, n1: usize, n2: usize, d: usize, r: u32) -> Result<f64> {
        match *self {
            EpsilonRule::Fixed(e) => Ok(e),
            EpsilonRule::Theorem3 { alpha, c } => select_epsilon(n1 + n2, d, r, alpha, c),
            EpsilonRule::Scaled(a) => Ok(a / n1 as f64),
            EpsilonRule::Exact => Ok(0.0),
        }
    }
}

impl std::fmt::Display for EpsilonRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EpsilonRule::Fixed(e) => write!(f, "fixed({e})"),
            EpsilonRule::Theorem3 { alpha, c } => write!(f, "theorem3({alpha},{c})"),
            EpsilonRule::Scaled(a) => write!(f, "scaled({a})"),
            EpsilonRule::Exact => f.write_str("none"),
        }
    }
}

/// The quantity each replication estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// The functional itself, `Q̃_n` (or `Q_n`), with residual `√n(Q - q)/√k_n`.
    Q,
    /// Entropy `H_n`, with the normalized residual pivot.
    Entropy,
    /// Variability `v`, i.e. the entropy of order (1,1).
    Variability,
    /// Bregman distance of order `s`; no residuals.
    Bregman { s: u32, symmetrized: bool },
}

impl std::fmt::Display for Target {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Target::Q => f.write_str("q"),
            Target::Entropy => f.write_str("h"),
            Target::Variability => f.write_str("v"),
            Target::Bregman { s, symmetrized: false } => write!(f, "bregman({s})"),
            Target::Bregman { s, symmetrized: true } => write!(f, "bregman-sym({s})"),
        }
    }
}

/// One cell of a Monte Carlo study.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(serialize_with = "display")]
    pub dist_x: DistributionSpec,
    #[serde(serialize_with = "display_opt")]
    pub dist_y: Option<DistributionSpec>,
    pub n1: usize,
    pub n2: usize,
    pub order: FunctionalOrder,
    pub mode: Mode,
    pub epsilon_rule: EpsilonRule,
    pub n_sim: usize,
    pub seed: u64,
    pub target: Target,
    pub ci_level: Option<f64>,
}

fn display<S: serde::Serializer>(v: &DistributionSpec, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn display_opt<S: serde::Serializer>(
    v: &Option<DistributionSpec>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.collect_str(v),
        None => s.serialize_none(),
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        if self.n_sim == 0 {
            return cfg("n_sim must be at least 1".into());
        }
        if self.dist_x.mode() != self.mode {
            return cfg(format!("x = {} is not a {} distribution", self.dist_x, self.mode));
        }
        if let Some(y) = &self.dist_y {
            if y.mode() != self.mode {
                return cfg(format!("y = {y} is not a {} distribution", self.mode));
            }
            if y.dim() != self.dist_x.dim() {
                return cfg("x and y have different dimensions".into());
            }
        }
        let needs_y = match self.target {
            Target::Bregman { .. } | Target::Variability => true,
            _ => self.order.r1 == 0 || self.order.r2 > 0,
        };
        if needs_y && (self.dist_y.is_none() || self.n2 == 0) {
            return cfg(format!("target {} with order {} needs y and n2 > 0", self.target, self.order));
        }
        if self.n1 == 0 {
            return cfg("n1 must be positive".into());
        }
        match self.target {
            Target::Entropy if self.order.r() < 2 => {
                return cfg("entropy targets need r1 + r2 >= 2".into());
            }
            Target::Variability if self.order != (FunctionalOrder { r1: 1, r2: 1 }) => {
                return cfg("target v requires order (1,1)".into());
            }
            Target::Bregman { s, .. } if s < 2 => return cfg("bregman order must be at least 2".into()),
            _ => {}
        }
        match (self.mode, self.epsilon_rule) {
            (Mode::Discrete, EpsilonRule::Exact) => {}
            (Mode::Discrete, _) => return cfg("discrete mode takes epsilon = none".into()),
            (Mode::Continuous, EpsilonRule::Exact) => {
                return cfg("continuous mode needs an epsilon rule".into())
            }
            (Mode::Continuous, EpsilonRule::Fixed(e)) | (Mode::Continuous, EpsilonRule::Scaled(e))
                if !(e > 0.0 && e.is_finite()) =>
            {
                return cfg("epsilon parameters must be positive".into())
            }
            _ => {}
        }
        if let Some(l) = self.ci_level {
            if !(l > 0.0 && l < 1.0) {
                return cfg("ci_level must lie in (0,1)".into());
            }
        }
        self.dist_x.validate().map_err(|e| Error::Config(e.to_string()))?;
        if let Some(y) = &self.dist_y {
            y.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(())
    }

    /// Bandwidth for this cell.
    pub fn epsilon(&self) -> Result<f64> {
        self.epsilon_rule
            .resolve(self.n1, self.n2, self.dist_x.dim(), self.order.r())
    }
}

/// A named set of cells sharing everything but sample size and bandwidth rule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Study {
    pub name: String,
    pub cells: Vec<ExperimentConfig>,
    /// Whether the study sweeps sizes or bandwidths (more than one cell).
    pub is_curve: bool,
}

impl Study {
    /// Replaces the seed of every cell.
    pub fn with_seed(mut self, seed: u64) -> Self {
        for c in &mut self.cells {
            c.seed = seed;
        }
        self
    }

    pub fn with_n_sim(mut self, n_sim: usize) -> Self {
        for c in &mut self.cells {
            c.n_sim = n_sim;
        }
        self
    }
}

const SCHEMA: &[(&str, &[&str])] = &[
    ("experiment", &["name", "target", "n_sim", "seed", "ci_level"]),
    ("samples", &["mode", "x", "y", "n1", "n2", "n_list"]),
    ("estimator", &["r1", "r2", "epsilon"]),
];

fn parse_sections(text: &str) -> Result<BTreeMap<(String, String), String>> {
    let mut section: Option<String> = None;
    let mut out = BTreeMap::new();
    let mut unknown = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = name.trim().to_string();
            if !SCHEMA.iter().any(|(s, _)| *s == name) {
                unknown.push(format!("[{name}]"));
            }
            section = Some(name);
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected `key = value`, got {line:?}", lineno + 1))
        })?;
        let key = key.trim().to_string();
        let Some(sec) = section.clone() else {
            return Err(Error::Config(format!("line {}: key {key:?} outside a section", lineno + 1)));
        };
        match SCHEMA.iter().find(|(s, _)| *s == sec) {
            Some((_, keys)) if keys.contains(&key.as_str()) => {}
            Some(_) => unknown.push(format!("{sec}.{key}")),
            None => continue,
        }
        if out.insert((sec.clone(), key.clone()), value.trim().to_string()).is_some() {
            return Err(Error::Config(format!("duplicate key {sec}.{key}")));
        }
    }
    if !unknown.is_empty() {
        return Err(Error::Config(format!("unknown keys: {}", unknown.join(", "))));
    }
    Ok(out)
}

fn call_args<'a>(s: &'a str, name: &str) -> Option<Vec<&'a str>> {
    let inner = s.strip_prefix(name)?.trim().strip_prefix('(')?.strip_suffix(')')?;
    Some(inner.split(',').map(|a| a.trim().trim_start_matches(|c: char| c.is_alphabetic() || c == '=' || c == '_')).collect())
}

fn parse_epsilon(s: &str) -> Result<Vec<EpsilonRule>> {
    let bad = || Error::Config(format!("cannot parse estimator.epsilon = {s:?}"));
    let num = |a: &str| a.trim().parse::<f64>().map_err(|_| bad());
    let s = s.trim();
    if s == "none" || s == "exact" {
        return Ok(vec![EpsilonRule::Exact]);
    }
    if let Some(args) = call_args(s, "fixed") {
        return args.iter().map(|a| num(a).map(EpsilonRule::Fixed)).collect();
    }
    if let Some(args) = call_args(s, "scaled") {
        return args.iter().map(|a| num(a).map(EpsilonRule::Scaled)).collect();
    }
    if let Some(args) = call_args(s, "theorem3") {
        if args.len() != 2 {
            return Err(bad());
        }
        return Ok(vec![EpsilonRule::Theorem3 { alpha: num(args[0])?, c: num(args[1])? }]);
    }
    if let Ok(v) = s.parse::<f64>() {
        return Ok(vec![EpsilonRule::Fixed(v)]);
    }
    Err(bad())
}

fn parse_target(s: &str) -> Result<Target> {
    let bad = || Error::Config(format!("cannot parse experiment.target = {s:?}"));
    match s.trim() {
        "q" => Ok(Target::Q),
        "h" | "ks-residuals" => Ok(Target::Entropy),
        "v" => Ok(Target::Variability),
        other => {
            let (args, symmetrized) = match call_args(other, "bregman-sym") {
                Some(a) => (a, true),
                None => (call_args(other, "bregman").ok_or_else(bad)?, false),
            };
            let s = args.first().and_then(|a| a.parse::<u32>().ok()).ok_or_else(bad)?;
            Ok(Target::Bregman { s, symmetrized })
        }
    }
}

/// Parses a config file into a study, expanding `n_list` and multi-valued epsilon rules.
pub fn parse_study(text: &str) -> Result<Study> {
    let kv = parse_sections(text)?;
    let get = |sec: &str, key: &str| kv.get(&(sec.to_string(), key.to_string())).map(String::as_str);
    let mut missing = Vec::new();
    let mut req = |sec: &str, key: &str| -> String {
        get(sec, key).map(str::to_string).unwrap_or_else(|| {
            missing.push(format!("{sec}.{key}"));
            String::new()
        })
    };
    let name = req("experiment", "name");
    let target_s = req("experiment", "target");
    let n_sim_s = req("experiment", "n_sim");
    let mode_s = req("samples", "mode");
    let x_s = req("samples", "x");
    if get("samples", "n1").is_none() && get("samples", "n_list").is_none() {
        missing.push("samples.n1".into());
    }
    if !missing.is_empty() {
        return Err(Error::Config(format!("missing keys: {}", missing.join(", "))));
    }

    let keyed = |k: &str, e: Error| Error::Config(format!("{k}: {e}"));
    let int = |k: &str, v: &str| {
        v.parse::<u64>()
            .map_err(|_| Error::Config(format!("{k} = {v:?} is not a non-negative integer")))
    };
    let target = parse_target(&target_s)?;
    let n_sim = int("experiment.n_sim", &n_sim_s)? as usize;
    let seed = get("experiment", "seed").map_or(Ok(1), |v| int("experiment.seed", v))?;
    let ci_level = get("experiment", "ci_level")
        .map(|v| v.parse::<f64>().map_err(|_| Error::Config(format!("experiment.ci_level = {v:?}"))))
        .transpose()?;
    let mode: Mode = mode_s.parse().map_err(|e| keyed("samples.mode", e))?;
    let dist_x: DistributionSpec = x_s.parse().map_err(|e| keyed("samples.x", e))?;
    let dist_y: Option<DistributionSpec> = get("samples", "y")
        .map(|v| v.parse().map_err(|e| keyed("samples.y", e)))
        .transpose()?;
    let default_order = match target {
        Target::Variability => (1, 1),
        Target::Bregman { s, .. } => (s, 0),
        _ => (2, 0),
    };
    let r1 = get("estimator", "r1").map_or(Ok(default_order.0 as u64), |v| int("estimator.r1", v))? as u32;
    let r2 = get("estimator", "r2").map_or(Ok(default_order.1 as u64), |v| int("estimator.r2", v))? as u32;
    let order = FunctionalOrder::new(r1, r2).map_err(|e| keyed("estimator", e))?;
    let rules = match get("estimator", "epsilon") {
        Some(v) => parse_epsilon(v)?,
        None if mode == Mode::Discrete => vec![EpsilonRule::Exact],
        None => return Err(Error::Config("missing keys: estimator.epsilon".into())),
    };

    let sizes: Vec<(usize, usize)> = match get("samples", "n_list") {
        Some(list) => list
            .split(',')
            .map(|v| int("samples.n_list", v.trim()).map(|n| (n as usize, n as usize)))
            .collect::<Result<_>>()?,
        None => {
            let n1 = int("samples.n1", get("samples", "n1").unwrap_or_default())? as usize;
            let n2 = get("samples", "n2").map_or(Ok(0), |v| int("samples.n2", v))? as usize;
            vec![(n1, n2)]
        }
    };

    let mut cells = Vec::new();
    for rule in &rules {
        for &(n1, n2) in &sizes {
            let n2 = if dist_y.is_none() { 0 } else { n2 };
            let cell = ExperimentConfig {
                name: name.clone(),
                dist_x: dist_x.clone(),
                dist_y: dist_y.clone(),
                n1,
                n2,
                order,
                mode,
                epsilon_rule: *rule,
                n_sim,
                seed,
                target,
                ci_level,
            };
            cell.validate()?;
            cells.push(cell);
        }
    }
    Ok(Study {
        name,
        is_curve: cells.len() > 1,
        cells,
    })
}

pub const PRESET_NAMES: [&str; 4] = ["example1", "example2", "example3", "example4"];

/// Config text of a shipped preset.
pub fn preset_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "example1" => EXAMPLE1,
        "example2" => EXAMPLE2,
        "example3" => EXAMPLE3,
        "example4" => EXAMPLE4,
        _ => return None,
    })
}

pub fn preset(name: &str) -> Option<Study> {
    preset_text(name).map(|t| parse_study(t).expect("shipped presets parse"))
}

const EXAMPLE1: &str = "\
[experiment]
name = example1
target = h
n_sim = 500
seed = 1
ci_level = 0.95

[samples]
mode = discrete
x = bernoulliProduct(3,0.8)
n1 = 300

[estimator]
r1 = 3
r2 = 0
epsilon = none
";

const EXAMPLE2: &str = "\
[experiment]
name = example2
target = v
n_sim = 300
seed = 1
ci_level = 0.95

[samples]
mode = continuous
x = gaussian1d(0,1.5)
y = gaussian1d(2,0.5)
n1 = 100
n2 = 200

[estimator]
r1 = 1
r2 = 1
epsilon = fixed(0.1)
";

const EXAMPLE3: &str = "\
[experiment]
name = example3
target = h
n_sim = 300
seed = 1
ci_level = 0.95

[samples]
mode = continuous
x = gaussianIsoD(2)
n1 = 300

[estimator]
r1 = 3
r2 = 0
epsilon = fixed(0.5)
";

const EXAMPLE4: &str = "\
[experiment]
name = example4
target = bregman(2)
n_sim = 2000
seed = 1

[samples]
mode = continuous
x = exponential(1)
y = exponential(3)
n_list = 100,200,400

[estimator]
epsilon = scaled(2,5,10)
";

/// Renders one cell back into the config format.
pub fn to_config_text(cfg: &ExperimentConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "[experiment]");
    let _ = writeln!(s, "name = {}", cfg.name);
    let _ = writeln!(s, "target = {}", cfg.target);
    let _ = writeln!(s, "n_sim = {}", cfg.n_sim);
    let _ = writeln!(s, "seed = {}", cfg.seed);
    if let Some(l) = cfg.ci_level {
        let _ = writeln!(s, "ci_level = {l}");
    }
    let _ = writeln!(s, "\n[samples]");
    let _ = writeln!(s, "mode = {}", cfg.mode);
    let _ = writeln!(s, "x = {}", cfg.dist_x);
    if let Some(y) = &cfg.dist_y {
        let _ = writeln!(s, "y = {y}");
    }
    let _ = writeln!(s, "n1 = {}", cfg.n1);
    let _ = writeln!(s, "n2 = {}", cfg.n2);
    let _ = writeln!(s, "\n[estimator]");
    let _ = writeln!(s, "r1 = {}", cfg.order.r1);
    let _ = writeln!(s, "r2 = {}", cfg.order.r2);
    let _ = writeln!(s, "epsilon = {}", cfg.epsilon_rule);
    s
}
