//! Crate-wide error type.
//!
//! Every fallible operation returns [`Error`]. The CLI maps these onto its
//! exit codes: invalid arguments → 1, input/format problems → 2, numeric
//! failures → 3 (see [`Error::exit_code`]).

use std::path::PathBuf;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller-supplied parameter is out of range or inconsistent.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Mismatched dimensions between operands.
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    /// Reading or writing a file failed.
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A text record could not be parsed.
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    /// A container file is malformed (bad magic, truncation, ...).
    #[error("container format: {0}")]
    Format(String),

    /// Input content is well-formed but unusable (zero-energy signal,
    /// constant reference, ...).
    #[error("bad data: {0}")]
    Data(String),

    /// A numeric routine could not complete (singular system, divergence, ...).
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    /// Process exit code the CLI uses for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) => 1,
            Error::DimMismatch(_) => 1,
            Error::Io { .. } | Error::Parse { .. } | Error::Format(_) | Error::Data(_) => 2,
            Error::Numeric(_) => 3,
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn dim(msg: impl Into<String>) -> Error {
    Error::DimMismatch(msg.into())
}

pub(crate) fn numeric(msg: impl Into<String>) -> Error {
    Error::Numeric(msg.into())
}

pub(crate) fn format(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

pub(crate) fn data(msg: impl Into<String>) -> Error {
    Error::Data(msg.into())
}
