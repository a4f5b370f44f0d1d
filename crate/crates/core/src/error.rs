use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("not positive definite: {0}")]
    NotPositiveDefinite(String),
    #[error("degree {0} out of range")]
    DegreeOutOfRange(usize),
    #[error("truncation: {0}")]
    Truncation(String),
    #[error("numeric diagnostics failed: {0}")]
    Numeric(String),
    #[error("linear algebra backend: {0}")]
    Backend(String),
}

pub type Result<T> = std::result::Result<T, Error>;
