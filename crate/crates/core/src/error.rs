use thiserror::Error;

/// Errors surfaced by model construction, analysis and the command front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("model error: {0}")]
    Model(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn model_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Model(msg.into()))
}
