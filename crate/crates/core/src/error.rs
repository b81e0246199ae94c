use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("eigen-iteration did not converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("state is numerically zero")]
    ZeroState,
    #[error("zero vector cannot be normalized")]
    ZeroVector,
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid projector: {0}")]
    InvalidProjector(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("malformed LMI problem: {0}")]
    MalformedProblem(String),
    #[error("solver failed: {0}")]
    SolverFailed(String),
    #[error("infeasible input: {0}")]
    InfeasibleInput(String),
    #[error("product dimension {0} exceeds guard {1}")]
    DimensionGuard(usize, usize),
}

pub type Result<T> = std::result::Result<T, Error>;
