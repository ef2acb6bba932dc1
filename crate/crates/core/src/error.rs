use thiserror::Error;

/// Errors produced by code construction, decoding setup and simulation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid code spec: {0}")]
    InvalidSpec(String),
    #[error("enumeration refused: K = {k} exceeds the limit of {limit}")]
    TooLarge { k: usize, limit: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
