//! Experiment runner: JSON configs in, CSV traces and `summary.json` out.

pub mod builtins;
pub mod config;
pub mod output;
pub mod run;

use std::fmt;

pub use config::ExperimentConfig;
pub use run::{run_config, run_path, RunOptions, RunReport};

/// Failure classes, each mapped to a process exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    /// malformed or out-of-range input (exit 2)
    Validation(String),
    /// well-formed input that fails a mathematical hypothesis (exit 3)
    Hypothesis(String),
    /// anything else (exit 1)
    Internal(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Validation(_) => 2,
            RunError::Hypothesis(_) => 3,
            RunError::Internal(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            RunError::Validation(m) | RunError::Hypothesis(m) | RunError::Internal(m) => m,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let class = match self {
            RunError::Validation(_) => "validation failed",
            RunError::Hypothesis(_) => "hypothesis rejected",
            RunError::Internal(_) => "internal error",
        };
        write!(f, "{class}: {}", self.message())
    }
}

impl std::error::Error for RunError {}

impl From<goodweights::Error> for RunError {
    fn from(e: goodweights::Error) -> Self {
        use goodweights::Error as E;
        if e.is_hypothesis_violation() {
            return RunError::Hypothesis(e.to_string());
        }
        match e {
            E::EigenSolver => RunError::Internal(e.to_string()),
            other => RunError::Validation(other.to_string()),
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Internal(format!("i/o: {e}"))
    }
}

impl From<csv::Error> for RunError {
    fn from(e: csv::Error) -> Self {
        RunError::Internal(format!("csv: {e}"))
    }
}
