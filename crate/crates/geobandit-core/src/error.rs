use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the domain of an operation (bad manifold, radius, scheme...).
    #[error("domain error: {0}")]
    Domain(String),
    /// Numerical failure, e.g. a factorization that did not succeed after jitter escalation.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// Malformed fixture or configuration text.
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
