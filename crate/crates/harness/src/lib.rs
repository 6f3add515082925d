//! Config-driven Monte Carlo runner for the kernel-regression experiments.
//!
//! A run is fully determined by its TOML config and master seed. Replicate
//! `r` draws its design from `split_seed(seed, [r, DESIGN])` and its error
//! innovations from `split_seed(seed, [r, ERRORS])`; the same innovations feed
//! every memory parameter of the ladder, so differences across `d` are not
//! blurred by independent noise.

pub mod config;
pub mod experiments;
pub mod report;

use std::path::{Path, PathBuf};

pub use config::ExperimentConfig;
pub use experiments::{run_conditions, run_cv_experiment, run_rate_study, run_simulate, run_table_experiment};
pub use report::{emit_report, parse_report, Cell, ExperimentReport, Provenance, Table};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("run failed: {0}")]
    Run(#[from] lrd_regression::Error),
    #[error("malformed report: {0}")]
    Report(String),
}

impl HarnessError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.to_path_buf(), source }
    }

    /// Process exit code: 2 config, 3 I/O, 4 run failure, 5 report parsing.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Io { .. } => 3,
            HarnessError::Run(_) => 4,
            HarnessError::Report(_) => 5,
        }
    }
}
