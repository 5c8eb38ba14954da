use thiserror::Error;

/// Errors raised by lattice computations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite entry at index {0}")]
    NonFinite(usize),
    #[error("empty input")]
    Empty,
    #[error("invalid exponent {0}")]
    InvalidExponent(f64),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("zero vector where a nonzero one is required")]
    ZeroVector,
    #[error("inputs are not disjoint")]
    NotDisjoint,
    #[error("operator is not positive")]
    NotPositive,
    #[error("negative entry at index {0}")]
    NegativeEntry(usize),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("incompatible norm: {0}")]
    IncompatibleNorm(String),
    #[error("constraint violated: {0}")]
    ConstraintViolated(String),
    #[error("distance {distance} exceeds bound {bound}")]
    BoundViolated { distance: f64, bound: f64 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, LatticeError>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(LatticeError::DimensionMismatch { expected, found });
    }
    Ok(())
}
