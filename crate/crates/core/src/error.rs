use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range for {what} of size {len}")]
    Index {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("structural mismatch: {0}")]
    Structural(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("game solver failed: {0}")]
    Solver(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// Every candidate threshold has a zero maximin volume.
    #[error("class is not learnable at the requested thresholds: {0}")]
    NotLearnable(String),

    #[error("witness does not certify a hitting set: {0}")]
    InvalidWitness(String),

    #[error("no escaping function found after {retries} retries (best max correlation {best})")]
    ProbabilisticFailure { retries: usize, best: f64 },

    #[error("counterexample check failed: {0}")]
    CounterexampleInvalid(String),

    #[error("degenerate class: {0}")]
    DegenerateClass(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }
}
