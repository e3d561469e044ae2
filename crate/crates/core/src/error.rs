use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point list is empty")]
    EmptyPoints,
    #[error("point {index} is not strictly positive ({value})")]
    NonPositivePoint { index: usize, value: f64 },
    #[error("point {index} is not finite")]
    NonFinitePoint { index: usize },
    #[error("duplicate point at index {index}")]
    DuplicatePoint { index: usize },
    #[error("points not increasing at index {index}")]
    NotIncreasing { index: usize },
    #[error("exponent {0} is not an integer")]
    NotInteger(f64),
    #[error("configuration has no exact rational representation")]
    MissingExact,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix order {order} exceeds the supported maximum {max}")]
    TooLarge { order: usize, max: usize },
    #[error("eigensolver did not converge after {sweeps} sweeps at {bits} bits")]
    NoConvergence { sweeps: usize, bits: u32 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
}

pub type Result<T> = std::result::Result<T, Error>;
