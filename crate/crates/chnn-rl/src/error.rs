//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A vector or matrix had the wrong length for the operation.
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    /// A configuration field failed validation.
    #[error("invalid config: {field}: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    /// A computation produced a non-finite number where one is not allowed.
    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },

    /// Episode placement could not satisfy the separation constraints.
    #[error("placement retry limit exceeded after {attempts} draws")]
    PlacementRetries { attempts: usize },

    /// Every perturbation in a Lyapunov estimate collapsed to zero distance.
    #[error("degenerate Lyapunov estimate: all {total} perturbations gave zero post-step distance")]
    DegenerateLyapunov { total: usize },

    /// An operation was asked of a checkpoint kind that does not support it.
    #[error("unsupported for checkpoint kind {kind:?}: {what}")]
    UnsupportedCheckpoint { kind: String, what: &'static str },

    /// A checkpoint or log was written by an incompatible format version.
    #[error("format version mismatch in {what}: expected {expected}, got {got}")]
    VersionMismatch {
        what: &'static str,
        expected: u32,
        got: u32,
    },

    /// A JSONL episode log contained a line that does not parse.
    #[error("malformed log line {line}: {reason}")]
    MalformedLog { line: usize, reason: String },

    /// An episode log had no step rows.
    #[error("episode log is empty")]
    EmptyLog,

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON error in {what}: {source}")]
    Json {
        what: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("TOML error in {what}: {source}")]
    Toml {
        what: String,
        #[source]
        source: toml::de::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn invalid_config(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field,
            reason: reason.into(),
        }
    }
}
