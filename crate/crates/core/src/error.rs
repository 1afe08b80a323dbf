use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite entry {value} at row {row}, column {col}")]
    NonFinite { row: usize, col: usize, value: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{what} = {value} is out of range (allowed {min}..={max})")]
    OutOfBounds {
        what: &'static str,
        value: usize,
        min: usize,
        max: usize,
    },

    #[error("correlation is undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn out_of_bounds(what: &'static str, value: usize, min: usize, max: usize) -> Self {
        Error::OutOfBounds { what, value, min, max }
    }
}
