use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("factor index {index} out of range for {count} factors")]
    InvalidFactor { index: usize, count: usize },

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("operator is not unitary (max |U^dag U - I| = {0:e})")]
    NotUnitary(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("joint dimension {dim} exceeds the size guard of {limit}")]
    SizeGuard { dim: usize, limit: usize },

    #[error("outcome probabilities sum to {0}, expected 1")]
    ProbabilityTotal(f64),

    #[error("label {0:?} not present in measurement basis")]
    UnknownLabel(String),

    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),

    #[error("numerical routine failed: {0}")]
    Numerical(&'static str),
}
