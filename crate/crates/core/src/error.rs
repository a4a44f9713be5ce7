use thiserror::Error;

/// Errors raised by the library operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is empty")]
    EmptyMatrix,

    #[error("row {row} has {found} entries, expected {expected}")]
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("entry ({row}, {col}) = {value} is negative")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("row {row} sums to {sum}, expected 1")]
    RowSumViolation { row: usize, sum: f64 },

    #[error("{entries} matrix entries exceed the budget of {budget}")]
    SizeExceeded { entries: u128, budget: u128 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("expected {expected} axes, found {found}")]
    AxisCountMismatch { expected: usize, found: usize },

    #[error("set is empty")]
    EmptySet,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: measured distance {measured} exceeds eps {eps}")]
    PreconditionViolated { measured: f64, eps: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
