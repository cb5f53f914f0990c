use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension must be positive, got {0}")]
    InvalidDimension(usize),

    #[error("multi-index {index:?} has {got} components, expected {expected}")]
    DimensionMismatch {
        index: Vec<i32>,
        got: usize,
        expected: usize,
    },

    #[error("multi-index {index:?} lies outside the box |k_j| <= {degree}")]
    OutsideBox { index: Vec<i32>, degree: usize },

    #[error("grid size {m} aliases degree {degree}: need m >= 2K+1 = {}", 2 * degree + 1)]
    Aliasing { m: usize, degree: usize },

    #[error("sample field has {got} values, expected {expected}")]
    FieldSize { got: usize, expected: usize },

    #[error("multiplier defined up to nu = {have}, function needs nu = {needed}")]
    MultiplierTooShort { needed: usize, have: usize },

    #[error("coefficients are not Hermitian-symmetric at {0:?}")]
    NotHermitian(Vec<i32>),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("slope fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),

    #[error("slope fit needs positive values, got {0}")]
    NonPositive(f64),

    #[error("cannot parse {what}: {input}")]
    Parse { what: &'static str, input: String },
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
