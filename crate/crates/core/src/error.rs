//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by samplers, inference, and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// A distribution parameter was outside its domain.
    #[error("parameter `{name}` out of domain: {value}")]
    ParamDomain { name: &'static str, value: f64 },

    /// A configuration value (or combination of values) is invalid.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// An error rate was requested over an empty test set.
    #[error("cannot estimate error on an empty test set")]
    EmptyTestSet,

    /// File I/O failed; the path gives the offending file.
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// CSV encoding failed while writing the given file.
    #[error("writing {}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    /// Writing a diagnostic trace failed.
    #[error("trace output: {0}")]
    Trace(#[source] std::io::Error),

    /// The worker thread pool could not be constructed.
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64) -> Self {
        Error::ParamDomain { name, value }
    }

    /// Wrap an I/O failure with the path it concerns.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user-supplied configuration, as opposed
    /// to failures while running a valid scenario.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_))
    }
}
