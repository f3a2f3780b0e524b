use thiserror::Error;

/// Errors produced by graph parsing, validation, and the various
/// enumeration routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("operation requires an undirected graph: {0}")]
    DirectedInput(String),

    #[error("cap exceeded: {0}")]
    CapExceeded(String),

    #[error("hypothesis not satisfied: {0}")]
    Unsupported(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn cap(msg: impl Into<String>) -> Self {
        Error::CapExceeded(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
