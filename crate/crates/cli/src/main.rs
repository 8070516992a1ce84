//! `ionqec`: config-driven Monte Carlo sweeps, pulse design and scaling
//! tables. Every command writes CSV tables stamped with the config hash and
//! a `manifest.json` into `--out`.

mod config;
mod fit;
mod output;
mod pulse;
mod scaling;
mod simulate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Config;

#[derive(Parser, Debug)]
#[command(name = "ionqec", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the config shot count.
    #[arg(long, global = true)]
    shots: Option<u64>,
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true, env = "IONQEC_WORKERS")]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Monte Carlo memory experiments over a parameter grid.
    Simulate,
    /// Design a parallel pulse layer and sample its crosstalk.
    Pulse,
    /// Analytic logical-error bounds versus distance.
    Scaling,
    /// Slopes and thresholds from a simulate table.
    Fit,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn new(kind: &'static str, message: impl Into<String>) -> Self {
        CliError {
            kind,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new("config", message)
    }
}

impl From<ionqec::Error> for CliError {
    fn from(e: ionqec::Error) -> Self {
        let kind = match &e {
            ionqec::Error::InvalidParameter(_) => "invalid_parameter",
            ionqec::Error::NoThreshold { .. } => "no_threshold",
            ionqec::Error::NullSpaceExhausted { .. } => "null_space_exhausted",
            ionqec::Error::InfeasibleTarget(_) => "infeasible_target",
            ionqec::Error::Instability { .. } => "instability",
            ionqec::Error::Parse { .. } => "parse",
            ionqec::Error::Io(_) => "io",
            _ => "model",
        };
        CliError::new(kind, e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new("io", e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::new("csv", e.to_string())
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::new("usage", "--config is required"))?;
    let mut config = Config::load(path)?;
    if cli.seed.is_some() {
        config.seed = cli.seed;
    }
    if cli.shots.is_some() {
        config.shots = cli.shots;
    }
    let workers = match cli.workers.or(config.workers) {
        Some(0) => return Err(CliError::new("usage", "--workers must be at least 1")),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::new("runtime", e.to_string()))?;
    let base = path.parent().map(PathBuf::from).unwrap_or_default();
    pool.install(|| match cli.command {
        Command::Simulate => simulate::run(&config, &cli.out, workers),
        Command::Pulse => pulse::run(&config, &cli.out, workers),
        Command::Scaling => scaling::run(&config, &cli.out, workers),
        Command::Fit => fit::run(&config, &base, &cli.out, workers),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let report = serde_json::json!({ "error": { "kind": e.kind, "message": e.message } });
            eprintln!("{report}");
            ExitCode::from(if e.kind == "usage" || e.kind == "config" {
                2
            } else {
                1
            })
        }
    }
}
