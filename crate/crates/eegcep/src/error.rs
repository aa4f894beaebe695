//! Crate-wide error type and exit-code mapping.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input violates an operation precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// Inconsistent or unusable configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Malformed input file.
    #[error("parse error in {file}, line {line}: {msg}")]
    Parse {
        file: String,
        line: usize,
        msg: String,
    },

    /// A numeric procedure failed to produce a usable result.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Pearson correlation is undefined because a series is constant.
    #[error("undefined correlation: a series is constant")]
    ConstantSeries,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Process exit code for the CLI: 2 validation, 3 parse/IO, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Config(_) | Error::ConstantSeries => 2,
            Error::Parse { .. } | Error::Io(_) => 3,
            Error::Numerical(_) => 4,
        }
    }
}
