use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the metric, k-NN, geometry and experiment layers.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of an operation (mismatched point
    /// families, `k > n`, empty samples, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Two lazy sequences agreed on every coordinate up to the comparison cap.
    #[error("lazy sequences agree on the first {depth} coordinates (seed collision?)")]
    DepthExhausted { depth: usize },

    /// A space or experiment configuration is invalid.
    #[error("configuration error: {0}")]
    Config(String),

    /// A search or construction would exceed a configured resource cap.
    #[error("resource limit exceeded{}: {message}", level.map(|l| format!(" at level {l}")).unwrap_or_default())]
    Resource {
        level: Option<usize>,
        message: String,
    },

    /// The premises of a checker do not hold for the given instance.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Observed k-NN radii fell below the resolution of a truncated space.
    #[error("k-NN radius {radius:e} below truncation resolution {resolution:e}; increase the number of levels")]
    Resolution { radius: f64, resolution: f64 },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error on {}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
