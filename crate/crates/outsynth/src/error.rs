//! Error type shared across the crate.
//!
//! Errors carry a coarse category so the CLI can map them to stable exit
//! codes: configuration errors exit 2, data/IO errors exit 3, numerical
//! failures exit 4.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid configuration: bad hyperparameter value, contradictory flags,
    /// unknown config key, malformed dataset spec.
    #[error("config error: {0}")]
    Config(String),

    /// Dataset or model-file problems: missing files, malformed headers,
    /// checksum mismatches, empty classes.
    #[error("data error: {0}")]
    Data(String),

    /// IO failure while reading or writing an artifact.
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Numerical failure: diverging loss, non-finite weights, degenerate
    /// inputs to a numeric routine.
    #[error("numeric error: {0}")]
    Numeric(String),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI: 2 = config, 3 = data/io, 4 = numeric.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Data(_) | Error::Io { .. } => 3,
            Error::Numeric(_) => 4,
        }
    }
}
