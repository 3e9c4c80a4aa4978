use thiserror::Error;

/// Errors raised by model construction, mass queries and estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// An operation was called on a model that does not satisfy its
    /// structural requirement (separation condition, restriction flag, ...).
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no data: {0}")]
    NoData(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
