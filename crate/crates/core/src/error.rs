use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A point or parameter lies outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The caller violated a documented precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// The input is degenerate for this operation (e.g. f - mu vanishes identically).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A numerical routine failed to reach its tolerance.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// The estimator is not precise enough for the requested quantity.
    #[error("insufficient precision: {0}")]
    Precision(String),
}

pub type Result<T> = std::result::Result<T, Error>;
