//! Command-line front end. Exit codes: 0 ok, 2 input, 3 sample size, 4 config, 5 oracle.

mod experiment;
pub mod io;

use std::ffi::OsString;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::functional::FunctionalOrder;
use crate::inference::{analyze, bregman_estimate, join_size_estimate, select_epsilon, variability_estimate};
use crate::oracle::{closed_form_q, numeric_q, DistributionSpec};
use crate::sample::Mode;

pub use experiment::{resolve_study, run_study, StudyOutputs};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SAMPLE: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;
pub const EXIT_ORACLE: i32 = 5;

/// Seed override read by `experiment`.
pub const SEED_ENV: &str = "ENTROFUNC_SEED";

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InsufficientSample(_) => EXIT_SAMPLE,
        Error::Config(_) => EXIT_CONFIG,
        Error::Unsupported(_) => EXIT_ORACLE,
        Error::InvalidArgument(_)
        | Error::InvalidOrder(_)
        | Error::UndefinedInterval(_)
        | Error::CombinatorialExplosion(..)
        | Error::EmptyInput(_) => EXIT_INPUT,
    }
}

#[derive(Debug, Parser)]
#[command(name = "entrofunc", version, about = "Rényi entropy functionals from ε-coincidence U-statistics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate q, entropy, variance and intervals from sample files.
    Estimate(EstimateArgs),
    /// Run a Monte Carlo experiment from a config file or a preset.
    Experiment(ExperimentArgs),
    /// Print the reference value of q for catalog distributions.
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutoEps {
    pub alpha: f64,
    pub c: f64,
}

impl FromStr for AutoEps {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (mut alpha, mut c) = (None, None);
        for part in s.split(',') {
            let (k, v) = part.split_once('=').ok_or("expected alpha=A,c=C")?;
            let v: f64 = v.trim().parse().map_err(|_| format!("{v:?} is not a number"))?;
            match k.trim() {
                "alpha" => alpha = Some(v),
                "c" => c = Some(v),
                other => return Err(format!("unknown key {other:?}; expected alpha=A,c=C")),
            }
        }
        Ok(AutoEps {
            alpha: alpha.ok_or("missing alpha")?,
            c: c.ok_or("missing c")?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableSizes {
    pub m1: u64,
    pub m2: u64,
}

impl FromStr for TableSizes {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (a, b) = s.split_once(',').ok_or("expected m1,m2")?;
        let p = |v: &str| v.trim().parse::<u64>().map_err(|_| format!("{v:?} is not a table size"));
        Ok(TableSizes { m1: p(a)?, m2: p(b)? })
    }
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Sample file for X
    #[arg(long)]
    pub x: PathBuf,
    /// Sample file for Y
    #[arg(long)]
    pub y: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub r1: u32,
    #[arg(long, default_value_t = 0)]
    pub r2: u32,
    /// Coincidence radius (continuous mode)
    #[arg(long, conflicts_with = "auto_eps")]
    pub epsilon: Option<f64>,
    /// Rate-based radius from Hölder smoothness, e.g. alpha=2,c=1
    #[arg(long)]
    pub auto_eps: Option<AutoEps>,
    #[arg(long, default_value_t = Mode::Continuous)]
    pub mode: Mode,
    /// Confidence level for the entropy interval
    #[arg(long)]
    pub ci: Option<f64>,
    /// Write the JSON report (and a manifest beside it) here
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Expected ε-join size for tables of m1 and m2 records
    #[arg(long)]
    pub join_size: Option<TableSizes>,
    /// Bregman distance of this order between X and Y
    #[arg(long)]
    pub bregman: Option<u32>,
    #[arg(long, requires = "bregman")]
    pub symmetrized: bool,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Config file, or one of example1..example4
    pub config: String,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Worker threads (default: all cores); results do not depend on it
    #[arg(long)]
    pub threads: Option<usize>,
    /// Overrides the replication count
    #[arg(long)]
    pub n_sim: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub dist_x: DistributionSpec,
    #[arg(long)]
    pub dist_y: Option<DistributionSpec>,
    #[arg(long, default_value_t = 2)]
    pub r1: u32,
    #[arg(long, default_value_t = 0)]
    pub r2: u32,
    /// Use quadrature instead of the closed form
    #[arg(long)]
    pub numeric: bool,
    /// Quadrature intervals per axis
    #[arg(long, requires = "numeric")]
    pub grid: Option<usize>,
}

/// Parses the process arguments and runs; returns the exit code.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Estimate(a) => cmd_estimate(&a),
        Command::Experiment(a) => cmd_experiment(&a),
        Command::Oracle(a) => cmd_oracle(&a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn io_err(path: &std::path::Path, e: std::io::Error) -> Error {
    Error::InvalidArgument(format!("{}: {e}", path.display()))
}

/// Metadata written next to every file-producing run.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub arguments: Vec<String>,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub version: &'static str,
    pub started_unix: u64,
    pub duration_seconds: f64,
    pub outputs: Vec<String>,
}

impl RunManifest {
    fn new(command: &str, config: serde_json::Value, seed: Option<u64>, started: (SystemTime, Instant)) -> Self {
        RunManifest {
            command: command.into(),
            arguments: std::env::args().collect(),
            config,
            seed,
            version: env!("CARGO_PKG_VERSION"),
            started_unix: started.0.duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            duration_seconds: started.1.elapsed().as_secs_f64(),
            outputs: Vec::new(),
        }
    }

    fn write(&self, path: &std::path::Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        std::fs::write(path, text + "\n").map_err(|e| io_err(path, e))
    }
}

fn now() -> (SystemTime, Instant) {
    (SystemTime::now(), Instant::now())
}

fn cmd_estimate(a: &EstimateArgs) -> Result<()> {
    let started = now();
    let order = FunctionalOrder::new(a.r1, a.r2)?;
    let x = io::read_sample(&a.x, a.mode)?;
    let y = a.y.as_deref().map(|p| io::read_sample(p, a.mode)).transpose()?;
    let uses_y = order.r1 == 0 || order.r2 > 0;
    let n = x.len() + if uses_y { y.as_ref().map_or(0, |y| y.len()) } else { 0 };

    let epsilon = match (a.mode, a.epsilon, a.auto_eps) {
        (Mode::Discrete, ..) => 0.0,
        (Mode::Continuous, Some(e), _) => e,
        (Mode::Continuous, None, Some(AutoEps { alpha, c })) => {
            select_epsilon(n, x.dim(), order.r().max(2), alpha, c)?
        }
        (Mode::Continuous, None, None) => {
            return Err(Error::InvalidArgument("continuous mode needs --epsilon or --auto-eps".into()))
        }
    };

    let report = analyze(&x, y.as_ref(), order, epsilon, a.mode, a.ci)?;
    let need_y = |what: &str| Error::InvalidArgument(format!("{what} needs --y"));
    let bregman = match a.bregman {
        Some(s) => {
            let y = y.as_ref().ok_or_else(|| need_y("--bregman"))?;
            Some(bregman_estimate(&x, y, s, epsilon, a.symmetrized)?)
        }
        None => None,
    };
    let join = match a.join_size {
        Some(TableSizes { m1, m2 }) => {
            let y = y.as_ref().ok_or_else(|| need_y("--join-size"))?;
            let v = variability_estimate(&x, y, epsilon)?.h_hat;
            Some(json!({
                "m1": m1,
                "m2": m2,
                "variability": v,
                "expected_size": join_size_estimate(m1, m2, epsilon, x.dim(), v)?,
            }))
        }
        None => None,
    };

    let mut line = format!(
        "order={} mode={} n1={} n2={} epsilon={} Q={} k_n={}",
        order, report.mode, report.n1, report.n2, report.epsilon, report.q.value, report.variance.kappa_hat
    );
    if let Some(h) = &report.entropy {
        line += &format!(" H={}", h.h_hat);
    }
    if let Some(ci) = &report.interval {
        line += &format!(" CI{}=[{}, {}]", ci.level, ci.lower, ci.upper);
    }
    if let Some(b) = &bregman {
        line += &format!(" {}={}", if b.symmetrized { "K" } else { "B" }, b.value);
    }
    if let Some(j) = &join {
        line += &format!(" join_size={}", j["expected_size"]);
    }
    println!("{line}");

    if let Some(out) = &a.out {
        let doc = json!({
            "report": report,
            "bregman": bregman,
            "join_size": join,
        });
        let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        std::fs::write(out, text + "\n").map_err(|e| io_err(out, e))?;
        let config = json!({
            "x": a.x, "y": a.y, "r1": a.r1, "r2": a.r2, "mode": a.mode, "epsilon": epsilon, "ci": a.ci,
        });
        let mut manifest = RunManifest::new("estimate", config, None, started);
        manifest.outputs.push(out.display().to_string());
        manifest.write(&out.with_extension("manifest.json"))?;
    }
    Ok(())
}

fn cmd_experiment(a: &ExperimentArgs) -> Result<()> {
    let started = now();
    let env_seed = match std::env::var(SEED_ENV) {
        Ok(v) => Some(
            v.trim()
                .parse::<u64>()
                .map_err(|_| Error::Config(format!("{SEED_ENV}={v:?} is not a 64-bit unsigned integer")))?,
        ),
        Err(_) => None,
    };
    let mut study = resolve_study(&a.config)?;
    if let Some(seed) = env_seed {
        study = study.with_seed(seed);
    }
    if let Some(n) = a.n_sim {
        if n == 0 {
            return Err(Error::Config("n_sim must be at least 1".into()));
        }
        study = study.with_n_sim(n);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let outputs = pool.install(|| run_study(&study, &a.out_dir))?;
    for line in &outputs.lines {
        println!("{line}");
    }
    let seed = study.cells.first().map(|c| c.seed);
    let config = serde_json::to_value(&study).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut manifest = RunManifest::new("experiment", config, seed, started);
    manifest.outputs = outputs.files.iter().map(|p| p.display().to_string()).collect();
    manifest.write(&a.out_dir.join("manifest.json"))
}

fn cmd_oracle(a: &OracleArgs) -> Result<()> {
    let order = FunctionalOrder::new(a.r1, a.r2)?;
    let value = if a.numeric {
        numeric_q(&a.dist_x, a.dist_y.as_ref(), order, a.grid)?
    } else {
        closed_form_q(&a.dist_x, a.dist_y.as_ref(), order).map_err(|e| match e {
            Error::Unsupported(m) => Error::Unsupported(format!("{m} (try --numeric)")),
            other => other,
        })?
    };
    println!("{}", io::significant12(value));
    Ok(())
}
