use std::io;

use thiserror::Error;

/// Errors produced anywhere in the codec pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    /// Malformed input file (header, payload size, sample range).
    #[error("format error: {0}")]
    Format(String),

    /// Frame or band dimensions do not agree.
    #[error("geometry mismatch: {0}")]
    Geometry(String),

    /// A caller-supplied parameter violates a precondition.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// The requested output format cannot represent the data.
    #[error("unrepresentable: {0}")]
    Unrepresentable(String),

    /// A motion vector reads outside the reference frame.
    #[error("motion vector out of bounds: {0}")]
    VectorOutOfBounds(String),

    /// Entropy-coded payload or container is damaged.
    #[error("corrupt stream: {0}")]
    Corrupt(String),

    /// An internal limit was exceeded (e.g. block payload over 65535 bytes).
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }

    pub(crate) fn geometry(msg: impl Into<String>) -> Self {
        Error::Geometry(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParam(msg.into())
    }

    pub(crate) fn corrupt(msg: impl Into<String>) -> Self {
        Error::Corrupt(msg.into())
    }

    /// Process exit code for the command-line front end:
    /// 1 usage error, 2 data error, 3 internal assertion.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParam(_) => 1,
            Error::Internal(_) => 3,
            _ => 2,
        }
    }
}
