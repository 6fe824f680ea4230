use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// An estimate collapsed to something that cannot be normalized.
    #[error("degenerate estimate: {0}")]
    Degenerate(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// NaN or overflow detected in a computed quantity.
    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Json(_) | Error::Usage(_) | Error::Domain(_) => 2,
            Error::Numeric(_) | Error::Degenerate(_) => 3,
            Error::Io(_) | Error::Csv(_) => 4,
        }
    }
}

/// Fails with [`Error::Numeric`] when `value` is not finite.
pub(crate) fn ensure_finite(what: &str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Numeric(format!("{what} evaluated to {value}")))
    }
}
