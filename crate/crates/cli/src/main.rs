//! `qad`: file-based pipeline around `qad-core`.
//!
//! `generate` writes a scenario suite, `simulate` runs it in closed loop and
//! writes per-cycle logs, `evaluate` turns a log into ROC curves and error
//! rate tables, `calibrate` prints data-free detector settings,
//! `replan-study` runs the adaptive re-planning experiment and `oracle` runs
//! the brute-force reference checks plus the latency timer.

mod commands;
mod config;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qad_core::Error;

/// Distinct exit statuses per failure kind. Argument parsing failures exit
/// with clap's status 2.
pub mod exit {
    pub const MISSING_INPUT: u8 = 3;
    pub const SCHEMA: u8 = 4;
    pub const INFEASIBLE: u8 = 5;
    pub const INVALID_ARGUMENT: u8 = 6;
    pub const UNDEFINED_METRIC: u8 = 7;
    pub const SCENARIO_FAULT: u8 = 8;
    pub const IO: u8 = 9;
}

#[derive(Debug, Parser)]
#[command(name = "qad", version, about = "Quantile anomaly detection experiments")]
pub struct Cli {
    /// JSON file with optional `sim`, `suite` and `replan` sections.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 0 uses the available parallelism.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    #[arg(long, global = true, default_value = "out")]
    pub out_dir: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a scenario suite as JSON.
    Generate {
        #[arg(long)]
        cycles: Option<usize>,
        #[arg(long)]
        positive_rate: Option<f64>,
    },
    /// Run a suite and write JSON-lines and CSV logs.
    Simulate {
        /// `default`, `null` (no injections) or a suite JSON file.
        #[arg(long, default_value = "default")]
        suite: String,
        /// Comma-separated detector names.
        #[arg(long, value_delimiter = ',')]
        detectors: Option<Vec<String>>,
        /// Overrides the number of cycles of a generated suite.
        #[arg(long)]
        cycles: Option<usize>,
    },
    /// Print the data-free rank offset and its bound.
    Calibrate {
        #[arg(long = "M", default_value_t = 100)]
        m: usize,
        #[arg(long, default_value_t = 0.05)]
        p: f64,
        #[arg(long, value_enum, default_value_t = Target::Fpr)]
        target: Target,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
    /// ROC curves, AUROC and error rates from a JSON-lines log.
    Evaluate {
        #[arg(long)]
        log: PathBuf,
        /// Also render the ROC curves as SVG.
        #[arg(long)]
        svg: bool,
    },
    /// Adaptive re-planning study; writes interval CDFs and means.
    ReplanStudy {
        #[arg(long)]
        runs: Option<usize>,
    },
    /// Brute-force reference checks and the detection latency timer.
    Oracle {
        #[arg(long, value_enum, default_value_t = OracleCheck::All)]
        check: OracleCheck,
        /// Invocations of the latency timer.
        #[arg(long, default_value_t = 10_000)]
        invocations: usize,
        /// Randomized cases of the quantile check.
        #[arg(long, default_value_t = 1_000)]
        cases: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Fpr,
    Fnr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleCheck {
    Bounds,
    Quantile,
    Latency,
    All,
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(io) if io.kind() == std::io::ErrorKind::NotFound => exit::MISSING_INPUT,
        Error::Io(_) => exit::IO,
        Error::Schema(_) | Error::Json(_) => exit::SCHEMA,
        Error::InfeasibleCalibration { .. } => exit::INFEASIBLE,
        Error::InvalidArgument(_) => exit::INVALID_ARGUMENT,
        Error::UndefinedMetric(_) => exit::UNDEFINED_METRIC,
        Error::ScenarioFault { .. } => exit::SCENARIO_FAULT,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("QS_LOG_LEVEL", "warn")).init();
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
