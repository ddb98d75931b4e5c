use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a documented precondition or type invariant.
    #[error("invalid input: {0}")]
    Validation(String),

    /// The request is well formed but beyond what the routine supports.
    #[error("unsupported: {0}")]
    Capability(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed kernel file: {0}")]
    Parse(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}

pub(crate) fn unsupported(msg: impl Into<String>) -> Error {
    Error::Capability(msg.into())
}
