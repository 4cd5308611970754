use thiserror::Error;

/// Errors raised by constructors and numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OrliczError {
    #[error("invalid probability space: {0}")]
    InvalidSpace(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("invalid Orlicz function: {0}")]
    InvalidFunction(String),

    #[error("objects live on different probability spaces")]
    SpaceMismatch,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("expectation undefined: +inf mixed with negative values")]
    UndefinedExpectation,

    #[error("negative argument {0} passed to an Orlicz function")]
    NegativeArgument(f64),

    #[error("empty family")]
    EmptyFamily,

    #[error("solver did not converge within {iterations} iterations (bracket [{lo}, {hi}])")]
    NoConvergence { iterations: usize, lo: f64, hi: f64 },

    #[error("functional is not in the conditional Orlicz space of the conjugate")]
    MembershipViolation,
}

pub type Result<T> = std::result::Result<T, OrliczError>;
