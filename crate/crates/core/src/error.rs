use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Input outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Supplied data (moduli, subset specs) fails a structural check.
    #[error("validation error: {0}")]
    Validation(String),
    /// Work or memory budget exceeded.
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    /// A cross-check between two independent routes disagreed.
    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
