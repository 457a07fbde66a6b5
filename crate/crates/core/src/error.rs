use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be at least {min}, got {found}")]
    DimensionTooSmall { min: usize, found: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("entry ({row}, {col}) must be finite and strictly positive, got {value}")]
    NonPositive { row: usize, col: usize, value: f64 },

    #[error("entry ({row}, {col}) must be finite, got {value}")]
    NonFinite { row: usize, col: usize, value: f64 },

    #[error("diagonal entry ({index}, {index}) must equal 1, got {value}")]
    Diagonal { index: usize, value: f64 },

    #[error("index ({row}, {col}) out of range for dimension {n}")]
    IndexOutOfRange { row: usize, col: usize, n: usize },

    #[error("entry ({row}, {col}) must lie strictly above the diagonal in reciprocal fill mode")]
    NotUpperTriangle { row: usize, col: usize },

    #[error("entry ({row}, {col}) supplied more than once")]
    DuplicateEntry { row: usize, col: usize },

    #[error("entry ({row}, {col}) missing in explicit fill mode")]
    MissingEntry { row: usize, col: usize },

    #[error("row {row}: {message}")]
    Malformed { row: usize, message: String },

    #[error("weight {index} must be finite and strictly positive, got {value}")]
    InvalidWeight { index: usize, value: f64 },

    #[error("weights violate {expected} normalization (off by {deviation:e})")]
    Normalization {
        expected: &'static str,
        deviation: f64,
    },

    #[error("importances must be nonnegative and sum to 1 (sum = {sum})")]
    Importance { sum: f64 },

    #[error("matrix is not reciprocal")]
    NotReciprocal,

    #[error(
        "power iteration did not converge after {iterations} iterations (residual {residual:e})"
    )]
    NotConverged { iterations: usize, residual: f64 },

    #[error(
        "matrix is numerically not diagonalizable (eigenvector condition estimate {condition:e})"
    )]
    NotDiagonalizable { condition: f64 },

    #[error("invalid parameter `{name}`: {message}")]
    Parameter { name: &'static str, message: String },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}
