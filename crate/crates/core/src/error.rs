use thiserror::Error;

/// Errors raised by the library. Each variant corresponds to one failure
/// class that callers (notably the CLI) map onto distinct exit codes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("cone is not pointed")]
    NonPointedCone,

    #[error("cone is not full-dimensional")]
    NotFullDimensional,

    #[error("divisor is not integral: {0}")]
    NonIntegralDivisor(String),

    #[error("unsupported backend operation: {0}")]
    UnsupportedBackend(String),

    #[error("unsupported base: {0}")]
    UnsupportedBase(String),

    #[error("divisor is not T-moveable: {0}")]
    NotTMoveable(String),

    #[error("weight {0} lies outside the weight cone")]
    WeightOutsideCone(String),

    #[error("cone is not a subcone of the weight cone")]
    NotSubcone,

    #[error("iteration limit of {limit} exceeded in {stage}")]
    IterationLimitExceeded { stage: String, limit: usize },

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
