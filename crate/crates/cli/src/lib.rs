//! Experiment harness: configuration, orchestration and reports.

pub mod config;
mod experiments;
pub mod report;

use std::path::PathBuf;

pub use config::{Experiment, ExperimentConfig, ModelConfig};
pub use experiments::{fit_loglog_slope, run_experiment, run_verify_envelope};
pub use report::{CheckRecord, EnvironmentStamp, VerificationReport};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] conekernel::Error),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl HarnessError {
    pub(crate) fn config(e: impl std::fmt::Display) -> Self {
        HarnessError::Config(e.to_string())
    }

    /// 2 for usage and configuration problems, 1 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Core(conekernel::Error::Domain(_))
            | HarnessError::Core(conekernel::Error::UnsupportedDimension { .. }) => 2,
            _ => 1,
        }
    }
}
