use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid cluster: {0}")]
    InvalidCluster(String),

    #[error("degenerate cluster: {0}")]
    DegenerateCluster(String),

    #[error("too few samples: need m >= {needed}, got m = {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("down-sampling produced an empty result (m = {m}, fraction = {fraction})")]
    EmptyResult { m: usize, fraction: f64 },

    #[error("sequence `{0}` has no tokens")]
    EmptySequence(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("dimension mismatch in record `{id}`: expected {expected}, found {found}")]
    DimensionMismatch {
        id: String,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value in record `{id}` at axis {axis}")]
    NonFiniteValue { id: String, axis: usize },

    #[error("duplicate id `{id}` within label `{label}`, layer `{layer}`")]
    DuplicateId {
        id: String,
        label: String,
        layer: String,
    },

    #[error("class `{label}` has inconsistent sizes across layers: {sizes:?}")]
    InconsistentClassSize { label: String, sizes: Vec<usize> },

    #[error("class `{label}` is empty at fraction {fraction}")]
    EmptyClass { label: String, fraction: f64 },

    #[error("score join mismatch; unmatched fractions: {}", .0.join(", "))]
    JoinMismatch(Vec<String>),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
