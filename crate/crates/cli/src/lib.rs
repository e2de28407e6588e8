//! Command-line experiments: simulation, flow analysis, ground
//! classification and the tracking demo.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or validation error,
//! 3 numerical error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use puppyflow_core::Error;

pub mod commands;
pub mod config;
pub mod output;

pub use config::ExperimentConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("numerical error: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Data(e.to_string())
        }
    }
}

const PRECEDENCE: &str = "Settings are resolved as: command-line flags > config file (--config) > built-in defaults.";

#[derive(Debug, Parser)]
#[command(name = "puppyflow", version, about = "Sensorimotor information flows of a simulated quadruped", after_help = PRECEDENCE)]
pub struct Cli {
    /// TOML experiment config with optional [sim], [te], [classify] and [tracking] sections.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Root seed (for `simulate`, the episode seed).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one episode and write a recording CSV plus its .meta.json sidecar.
    #[command(after_help = PRECEDENCE)]
    Simulate {
        #[arg(long)]
        gait: Option<String>,
        #[arg(long)]
        ground: Option<String>,
        /// Seconds of simulated time.
        #[arg(long)]
        duration: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Transfer-entropy matrix of a recording.
    #[command(after_help = PRECEDENCE)]
    Te {
        /// Recording CSV (sidecar expected next to it).
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        bins: Option<u32>,
        #[arg(long)]
        history_k: Option<usize>,
        #[arg(long)]
        lag: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Dominant flows of a recording (or of a TE matrix CSV) as a DOT graph.
    #[command(after_help = PRECEDENCE)]
    Flows {
        /// Recording CSV or FlowMatrix CSV.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        top: Option<usize>,
        /// Exclusion preset: none or panel-CD.
        #[arg(long)]
        exclude: Option<String>,
        /// Surrogates per pair for significance (0 = off; recordings only).
        #[arg(long)]
        surrogates: Option<usize>,
        #[arg(long)]
        bins: Option<u32>,
        #[arg(long)]
        dot: PathBuf,
    },
    /// Cross-validated ground classification, pooled or per gait.
    #[command(after_help = PRECEDENCE)]
    Classify {
        /// Directory of recording CSVs; generated from the config when omitted.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, value_parser = ["pooled", "per-gait", "both"], default_value = "both")]
        mode: String,
        /// History lengths in epochs, comma separated.
        #[arg(long, value_delimiter = ',')]
        history: Option<Vec<usize>>,
        #[arg(long)]
        folds: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Visual-entropy comparison of a tracking vs an uncorrelated camera.
    #[command(name = "track-demo", after_help = PRECEDENCE)]
    TrackDemo {
        /// Number of paired runs.
        #[arg(long)]
        seeds: Option<usize>,
        #[arg(long)]
        gain: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a classification corpus (one CSV + sidecar per episode).
    #[command(name = "gen-corpus", after_help = PRECEDENCE)]
    GenCorpus {
        #[arg(long)]
        episodes: Option<usize>,
        #[arg(long)]
        duration: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Full pipeline: one flow graph per (gait, ground) and the classification report.
    #[command(name = "reproduce-box1", after_help = PRECEDENCE)]
    ReproduceBox1 {
        #[arg(long)]
        episodes: Option<usize>,
        #[arg(long)]
        duration: Option<f64>,
        /// Output directory (defaults to out_dir from the config).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code. Errors are reported on stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    commands::dispatch(cli.command, cfg)
}

pub(crate) fn display(p: &Path) -> String {
    p.display().to_string()
}
