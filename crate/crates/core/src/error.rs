use std::path::PathBuf;

use crate::quadrature::QuadratureError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("infinite mean: {0}")]
    InfiniteMean(String),

    #[error("numerical integration failed for {what}: {source}")]
    Quadrature {
        what: String,
        #[source]
        source: QuadratureError,
    },

    #[error("config error in {path}: {message}")]
    Config { path: String, message: String },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("at {context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn quadrature(what: impl Into<String>, source: QuadratureError) -> Self {
        Error::Quadrature {
            what: what.into(),
            source,
        }
    }

    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Innermost error, skipping any context wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for failures caused by user configuration rather than numerics or I/O.
    pub fn is_config(&self) -> bool {
        matches!(
            self.root(),
            Error::Config { .. } | Error::InvalidParameter { .. } | Error::InfiniteMean(_)
        )
    }

    /// Process exit code used by the CLI: 1 for configuration problems, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.is_config() {
            1
        } else {
            2
        }
    }
}

/// Rejects NaN, infinities and values that fail `ok`.
pub(crate) fn check(name: &str, value: f64, ok: impl Fn(f64) -> bool, what: &str) -> Result<f64> {
    if value.is_finite() && ok(value) {
        Ok(value)
    } else {
        Err(Error::invalid(name, format!("must be {what}, got {value}")))
    }
}

pub(crate) fn positive(name: &str, value: f64) -> Result<f64> {
    check(name, value, |v| v > 0.0, "finite and > 0")
}
