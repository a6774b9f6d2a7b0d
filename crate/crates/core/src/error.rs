use thiserror::Error;

use crate::freeness::Witness;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported size: {what} = {value} exceeds the guard {guard}")]
    UnsupportedSize {
        what: &'static str,
        value: usize,
        guard: usize,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("input contains a forbidden configuration: {0}")]
    NotFree(Box<Witness>),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
