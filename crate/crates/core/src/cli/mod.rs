//! Batch front end: `exitlab <command> --config experiment.json`.
//!
//! Exit codes: 0 success, 1 check failure, 2 configuration error,
//! 3 numerical failure.

mod commands;
mod config;

pub use commands::{overlay_rows, EstimateSummary, SolveSummary, ESTIMATE_SCHEMA_VERSION};
pub use config::{
    EstimateConfig, ExperimentConfig, FormatFlags, HotSpotsConfig, SolverConfig, VerifyConfig, CONFIG_SCHEMA_VERSION,
};

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::Error;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "EXITLAB_OUTPUT_DIR";

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "exitlab", version, about = "Exit times, spectra and survival bounds for diffusions")]
pub struct Cli {
    /// Worker threads for Monte Carlo batches (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Experiment configuration (JSON).
    #[arg(long, short)]
    pub config: PathBuf,
    /// Output directory; overrides the config file.
    #[arg(long, short, env = OUTPUT_DIR_ENV)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the Monte Carlo exit-time sampler and write the batch.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        paths: Option<usize>,
        #[arg(long)]
        step_size: Option<f64>,
    },
    /// Eigenvalue and mean-exit solves on the discretised domain.
    Solve {
        #[command(flatten)]
        common: Common,
    },
    /// Survival curve, moments and tail fit from the simulated batch.
    Estimate {
        #[command(flatten)]
        common: Common,
    },
    /// Run the survival check suite on solve and estimate outputs.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Comma-separated checks; overrides the config suite.
        #[arg(long, value_delimiter = ',')]
        suite: Option<Vec<String>>,
        /// Divides the rate used by the lower-bound check (negative
        /// control when above 1).
        #[arg(long, default_value_t = 1.0)]
        perturb_lambda: f64,
    },
    /// Hot-spots ratio and the Neumann/Dirichlet eigenvalue ratio.
    Hotspots {
        #[command(flatten)]
        common: Common,
    },
    /// Merge verification outputs into one report with plot data.
    Report {
        /// Verification JSON files or directories containing them.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, short, env = OUTPUT_DIR_ENV)]
        out: Option<PathBuf>,
    },
}

/// Exit code for an error: configuration and input problems give 2,
/// numerical failures give 3.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Singular(_)
        | Error::NoConvergence { .. }
        | Error::Censored { .. }
        | Error::FitRejected(_)
        | Error::Unstable(_)
        | Error::Contract(_) => EXIT_NUMERICAL,
        _ => EXIT_CONFIG,
    }
}

/// Parses `args` and runs the command.
pub fn run_from<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK });
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(EXIT_CONFIG);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    match commands::dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

pub fn main() -> ExitCode {
    run_from(std::env::args_os())
}
