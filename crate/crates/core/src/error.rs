use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An index, side or argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Exact exponents, block indices or floating-point norms ran out of range.
    #[error("capacity error: {0}")]
    Capacity(String),
    /// A dense truncation window was too small for the requested power.
    #[error("truncation error: {0}")]
    Truncation(String),
    /// Inconsistent thresholds, horizons or windows.
    #[error("configuration error: {0}")]
    Config(String),
    /// Malformed weight-spec, vector or set designation.
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
