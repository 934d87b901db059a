//! `run` / `verify` / `compare` commands.
//!
//! The binary is a thin front end over the library: scenarios come from the
//! built-in `paper` benchmark or a scenario file, optional flags override
//! individual fields, and results land in an output directory as trajectory
//! CSVs plus a plain-text summary.
//!
//! Exit codes: 0 success, 1 configuration error, 2 runtime abort,
//! 3 verification failure.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args as ClapArgs, Parser, Subcommand, ValueEnum};

use crate::dynamics::QSchedule;
use crate::error::Error;
use crate::filter::FilterKind;
use crate::measurement::{ReferenceVector, ReferenceVectorSet};
use crate::output;
use crate::scenario_file;
use crate::sim::{self, Scenario};
use crate::so3::Vector3;
use crate::verify;

/// Environment variable holding the default output directory.
pub const OUT_DIR_ENV: &str = "SO3_FILTER_OUT";

#[derive(Debug, Parser)]
#[command(
    name = "so3-filter",
    about = "Stochastic attitude filter simulator on SO(3)",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a scenario and write trajectory CSVs plus a summary.
    Run(RunArgs),
    /// Run the sampled identity/equivalence/noise verification suite.
    Verify(VerifyArgs),
    /// Run both filters on identical noise and write paired results.
    Compare(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FilterArg {
    Stochastic,
    Baseline,
}

impl From<FilterArg> for FilterKind {
    fn from(f: FilterArg) -> Self {
        match f {
            FilterArg::Stochastic => FilterKind::Stochastic,
            FilterArg::Baseline => FilterKind::Baseline,
        }
    }
}

#[derive(Debug, Clone, ClapArgs)]
pub struct RunArgs {
    /// Built-in scenario name (`paper`).
    #[arg(long, value_name = "NAME", conflicts_with = "scenario")]
    pub builtin: Option<String>,

    /// Scenario file path.
    #[arg(long, value_name = "PATH")]
    pub scenario: Option<PathBuf>,

    /// Override the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Override the integration step, seconds.
    #[arg(long)]
    pub dt: Option<f64>,

    /// Override the horizon, seconds.
    #[arg(long)]
    pub duration: Option<f64>,

    /// Number of Monte Carlo trials (seeds derived from the base seed).
    #[arg(long, default_value_t = 1)]
    pub trials: usize,

    /// Which filter to run.
    #[arg(long, value_enum)]
    pub filter: Option<FilterArg>,

    /// Output directory (default: $SO3_FILTER_OUT, then ./out).
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Log every n-th step.
    #[arg(long, value_name = "N", default_value_t = 10)]
    pub decimate: usize,

    /// Log every step (same as --decimate 1).
    #[arg(long)]
    pub full_rate: bool,

    /// Override gain k_w.
    #[arg(long)]
    pub k_w: Option<f64>,

    /// Override gain k_b.
    #[arg(long)]
    pub k_b: Option<f64>,

    /// Override gain k_sigma.
    #[arg(long)]
    pub k_sigma: Option<f64>,

    /// Override gain gamma.
    #[arg(long)]
    pub gamma: Option<f64>,

    /// Override gain epsilon.
    #[arg(long)]
    pub epsilon: Option<f64>,

    /// Override the gyro diffusion with a constant diagonal value.
    #[arg(long, value_name = "Q")]
    pub gyro_q: Option<f64>,

    /// Override every reference's body noise standard deviation.
    #[arg(long, value_name = "STD")]
    pub body_std: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyLevel {
    Fast,
    Full,
}

#[derive(Debug, Clone, ClapArgs)]
pub struct VerifyArgs {
    /// Sample budget.
    #[arg(value_enum, default_value_t = VerifyLevel::Fast)]
    pub level: VerifyLevel,

    /// Seed of the sampling stream.
    #[arg(long, default_value_t = verify::DEFAULT_SUITE_SEED)]
    pub seed: u64,
}

/// Command failure with its process exit code.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(Error),
    Verification(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Runtime(e) => write!(f, "runtime error: {e}"),
            CliError::Verification(n) => write!(f, "{n} verification check(s) failed"),
        }
    }
}

fn config_err(e: impl fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

/// Resolves scenario source and applies flag overrides.
pub fn load_scenario(args: &RunArgs) -> Result<Scenario, CliError> {
    let mut sc = match (&args.builtin, &args.scenario) {
        (Some(name), None) => match name.as_str() {
            "paper" => sim::paper_scenario(),
            other => {
                return Err(CliError::Config(format!(
                    "unknown builtin scenario `{other}` (available: paper)"
                )))
            }
        },
        (None, Some(path)) => scenario_file::parse_scenario_file(path).map_err(config_err)?,
        (None, None) => sim::paper_scenario(),
        (Some(_), Some(_)) => unreachable!("clap rejects conflicting sources"),
    };

    if let Some(seed) = args.seed {
        sc.seed = seed;
    }
    if let Some(dt) = args.dt {
        sc.dt = dt;
    }
    if let Some(duration) = args.duration {
        sc.duration = duration;
    }
    if let Some(filter) = args.filter {
        sc.filter_kind = filter.into();
    }
    if let Some(k_w) = args.k_w {
        sc.gains.k_w = k_w;
    }
    if let Some(k_b) = args.k_b {
        sc.gains.k_b = k_b;
    }
    if let Some(k_sigma) = args.k_sigma {
        sc.gains.k_sigma = k_sigma;
    }
    if let Some(gamma) = args.gamma {
        sc.gains.gamma = gamma;
    }
    if let Some(epsilon) = args.epsilon {
        sc.gains.epsilon = epsilon;
    }
    if let Some(q) = args.gyro_q {
        if q < 0.0 {
            return Err(CliError::Config(format!("--gyro-q must be >= 0, got {q}")));
        }
        sc.gyro.q = QSchedule::Constant(Vector3::new(q, q, q));
    }
    if let Some(std) = args.body_std {
        if std < 0.0 {
            return Err(CliError::Config(format!(
                "--body-std must be >= 0, got {std}"
            )));
        }
        let entries: Vec<ReferenceVector> = sc
            .refs
            .entries()
            .iter()
            .cloned()
            .map(|mut e| {
                e.noise_std = std;
                e
            })
            .collect();
        sc.refs = ReferenceVectorSet::new(entries).map_err(config_err)?;
    }

    sc.validate().map_err(config_err)?;
    if args.trials == 0 {
        return Err(CliError::Config("--trials must be >= 1".into()));
    }
    Ok(sc)
}

fn decimation(args: &RunArgs) -> usize {
    if args.full_rate {
        1
    } else {
        args.decimate
    }
}

fn out_dir(args: &RunArgs) -> Result<PathBuf, CliError> {
    let dir = args
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&dir)
        .map_err(|e| CliError::Runtime(Error::Io(e)))?;
    Ok(dir)
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Runtime(Error::Io(e)))
}

/// `run`: simulate and emit CSV(s) + summary. Returns the summary text.
pub fn cmd_run(args: &RunArgs) -> Result<String, CliError> {
    let sc = load_scenario(args)?;
    let dec = decimation(args);
    let dir = out_dir(args)?;

    let summary_text = if args.trials == 1 {
        let log = sim::run(&sc, dec).map_err(CliError::Runtime)?;
        output::write_csv(&log, &dir.join("trajectory.csv")).map_err(CliError::Runtime)?;
        output::run_summary(&sc, &log)
    } else {
        let trials = sim::run_trials(&sc, args.trials, dec);
        if let Some((_, Err(first))) = trials
            .iter()
            .all(|(_, r)| r.is_err())
            .then(|| &trials[0])
        {
            return Err(CliError::Runtime(Error::InvalidConfig(format!(
                "all {} trials failed; first: {first}",
                args.trials
            ))));
        }
        for (i, (_, result)) in trials.iter().enumerate() {
            if let Ok(log) = result {
                output::write_csv(log, &dir.join(format!("trial_{i:03}.csv")))
                    .map_err(CliError::Runtime)?;
            }
        }
        let summary = sim::MonteCarloSummary::from_trials(&trials);
        output::mc_summary(&sc, &summary)
    };
    write_file(&dir.join("summary.txt"), &summary_text)?;
    Ok(summary_text)
}

/// `verify`: run the suite and render the table; Err on any failed check.
pub fn cmd_verify(args: &VerifyArgs) -> Result<String, CliError> {
    let level = match args.level {
        VerifyLevel::Fast => verify::Level::Fast,
        VerifyLevel::Full => verify::Level::Full,
    };
    let results = verify::run_suite(level, args.seed);
    let table = verify::format_table(&results);
    let failed = results.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        // print what we have before signalling failure
        print!("{table}");
        return Err(CliError::Verification(failed));
    }
    Ok(table)
}

/// `compare`: both filters on identical noise realizations.
pub fn cmd_compare(args: &RunArgs) -> Result<String, CliError> {
    if args.filter.is_some() {
        return Err(CliError::Config(
            "`compare` runs both filters; --filter is not allowed".into(),
        ));
    }
    let base = load_scenario(args)?;
    let dec = decimation(args);
    let dir = out_dir(args)?;

    let mut results = Vec::new();
    for (kind, tag) in [
        (FilterKind::Stochastic, "stochastic"),
        (FilterKind::Baseline, "baseline"),
    ] {
        let sc = Scenario {
            filter_kind: kind,
            ..base.clone()
        };
        // derived trial seeds depend only on the base seed, so both filter
        // kinds consume identical noise streams
        let trials = sim::run_trials(&sc, args.trials, dec);
        for (i, (_, result)) in trials.iter().enumerate() {
            if let Ok(log) = result {
                output::write_csv(log, &dir.join(format!("{tag}_{i:03}.csv")))
                    .map_err(CliError::Runtime)?;
            }
        }
        if trials.iter().all(|(_, r)| r.is_err()) {
            return Err(CliError::Runtime(Error::InvalidConfig(format!(
                "all {tag} trials failed"
            ))));
        }
        results.push(sim::MonteCarloSummary::from_trials(&trials));
    }

    let text = output::compare_summary(&base, &results[0], &results[1]);
    write_file(&dir.join("compare_summary.txt"), &text)?;
    Ok(text)
}

/// Executes a parsed command line, printing its report on success.
pub fn execute(cli: Cli) -> Result<(), CliError> {
    let report = match &cli.command {
        Command::Run(args) => cmd_run(args)?,
        Command::Verify(args) => cmd_verify(args)?,
        Command::Compare(args) => cmd_compare(args)?,
    };
    print!("{report}");
    Ok(())
}
