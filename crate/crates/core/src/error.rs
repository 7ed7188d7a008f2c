use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid metric space: {0}")]
    InvalidSpace(String),
    #[error("point has dimension {found}, space expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite coordinate in point")]
    NonFinite,
    #[error("invalid distance matrix: {0}")]
    InvalidMatrix(String),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("duplicate points at indices {0} and {1}")]
    DuplicatePoints(usize, usize),
    #[error("no order exists for the given points")]
    NoOrder,
    #[error("tuple is not ordered: triple ({0}, {1}, {2}) violates the order condition")]
    NotOrdered(usize, usize, usize),
    #[error("extension data violates the Lipschitz condition at pair ({0}, {1})")]
    LipschitzViolation(usize, usize),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
