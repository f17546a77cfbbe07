use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite right-hand side at r = {radius}")]
    NumericalBlowup { radius: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no shooting bracket for state {n} with psi(0) in ({lo}, {hi}]")]
    BracketFailure { n: usize, lo: f64, hi: f64 },

    #[error("state {n}: converged trial has {found} nodes")]
    StateNotIsolated { n: usize, found: usize },

    #[error("scaling factor must be nonzero")]
    DegenerateScaling,

    #[error("asymptotic fit U = E + c/r failed: residual {residual:e}")]
    AsymptoteNotReached { residual: f64 },

    #[error("need at least 5 points for a slope fit, got {0}")]
    InsufficientData(usize),

    #[error("Chebyshev grid needs N >= 2, got {0}")]
    GridTooSmall(usize),

    #[error("grid radius {needed} beyond profile support [0, {available}]")]
    DomainMismatch { needed: f64, available: f64 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionError { expected: usize, found: usize },

    #[error("eigensolver failed: {reason} (condition estimate {condition:e})")]
    SolverError { reason: String, condition: f64 },

    #[error("trimmed second-derivative matrix is ill-conditioned (condition {0:e})")]
    IllConditioned(f64),

    #[error("mode has a vanishing A or B block")]
    DegenerateMode,

    #[error("tracked mode lost at parameter value {value}")]
    TrackingLost { value: f64 },

    #[error("energy {0} is not that of a bound state")]
    NotABoundState(f64),

    #[error("physical scales must be positive")]
    InvalidScales,

    #[error("document written by {found}, expected {expected}")]
    StaleDocument { expected: String, found: String },

    #[error("malformed document: {0}")]
    Format(String),

    #[error("state {n}: {source}")]
    AtState { n: usize, source: Box<Error> },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
