use thiserror::Error;

/// Failure modes shared across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("accuracy error: {what} (achieved bound {achieved:e})")]
    Accuracy { what: String, achieved: f64 },
    #[error("point at infinity: {0}")]
    Infinity(String),
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
