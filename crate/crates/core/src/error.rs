use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("variable index {index} out of range for arity {arity}")]
    IndexOutOfRange { index: usize, arity: usize },

    #[error("zero denominator")]
    ZeroDenominator,

    #[error("invalid rational literal `{0}`")]
    InvalidScalar(String),

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown variable `{name}` at line {line}, column {column}")]
    UnknownVariable {
        name: String,
        line: usize,
        column: usize,
    },

    #[error("exponent overflow")]
    ExponentOverflow,

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is rank deficient: rank {rank}, required {required}")]
    RankDeficient { rank: usize, required: usize },

    #[error("vectors are linearly dependent")]
    DependentVectors,

    #[error("invalid range: {0}")]
    BadRange(String),

    #[error("profile mismatch: {0}")]
    ProfileMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),
}
