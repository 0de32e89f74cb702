use thiserror::Error;

/// Errors raised by the discretization library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument {value} outside the domain of {what}")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid order profile: {0}")]
    InvalidProfile(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid quadrature configuration: {0}")]
    InvalidQuadrature(String),

    /// The fast L1 quadrature built directly on the order needs a strictly
    /// positive lower bound; its lower index is unbounded otherwise.
    #[error(
        "ESA lower index diverges for vanishing order lower bound (lower bound = {lower_bound})"
    )]
    EsaLowerIndexDiverges { lower_bound: f64 },

    #[error("near-zero pivot {pivot:e} at row {row} of tridiagonal solve")]
    SingularPivot { row: usize, pivot: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub type Result<T> = std::result::Result<T, Error>;
