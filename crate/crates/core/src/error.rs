use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the sampler, the bounds engine and the harness.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a documented precondition.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Cholesky factorization hit a non-positive pivot.
    #[error("matrix is not positive definite (minimum diagonal pivot {min_pivot:e})")]
    NotPositiveDefinite { min_pivot: f64 },

    /// Some other floating-point failure (non-finite values, no convergence).
    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The oracle grid could not be expanded to cover the posterior mass.
    #[error("oracle grid does not cover the posterior: {0}")]
    GridBounds(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed input {path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }

    /// True for failures that originate in floating-point arithmetic rather
    /// than in bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NotPositiveDefinite { .. } | Error::Numeric(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
