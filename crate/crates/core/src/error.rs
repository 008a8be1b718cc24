use thiserror::Error;

/// Errors raised by the numerics, state, channel and witness routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian: max |M - M^dagger| = {asymmetry:e}")]
    NotHermitian { asymmetry: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("map is not trace preserving: Tr_A residual = {residual:e}")]
    NotTracePreserving { residual: f64 },

    #[error("operator is not a valid state: {0}")]
    InvalidState(String),

    #[error("target profile is not monotone non-increasing at index {index}")]
    NonMonotoneProfile { index: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
