use thiserror::Error;

/// Errors raised across the search pipeline.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("shift {shift} out of range for length {len}")]
    ShiftOutOfRange { shift: usize, len: usize },

    #[error("compression factor {m} does not divide length {len}")]
    NotDivisible { m: usize, len: usize },

    #[error("expected a sequence of length {expected}, got {actual}")]
    Shape { expected: usize, actual: usize },

    #[error("sequence lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("length {0} is even; Legendre pairs need odd length")]
    EvenLength(usize),

    #[error("entry sum {0} is not +1 or -1")]
    BadSum(i64),

    #[error("entry {value} at index {index} is not -1 or +1")]
    BadEntry { index: usize, value: i64 },

    #[error("empty sequence")]
    Empty,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
