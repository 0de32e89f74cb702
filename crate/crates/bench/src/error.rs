use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Solver(#[from] fastcaputo::Error),

    #[error("reference cache {path}: {reason}")]
    Cache { path: PathBuf, reason: String },

    #[error("incompatible grids: {0}")]
    Grid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl BenchError {
    /// Errors caused by the requested configuration rather than by a run.
    pub fn is_validation(&self) -> bool {
        use fastcaputo::Error as E;
        match self {
            BenchError::Config(_) => true,
            BenchError::Solver(e) => !matches!(e, E::SingularPivot { .. } | E::Dimension(_)),
            _ => false,
        }
    }

    /// Process exit code: 2 for validation failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.is_validation() {
            2
        } else {
            1
        }
    }
}

pub type Result<T> = std::result::Result<T, BenchError>;
