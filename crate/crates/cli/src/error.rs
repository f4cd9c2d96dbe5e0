use thiserror::Error;

use crate::config::Kind;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown experiment `{0}` (expected one of: {1})")]
    UnknownExperiment(String, String),
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("unknown config key `{key}`; valid keys: {}", valid.join(", "))]
    UnknownKey { key: String, valid: Vec<String> },
    #[error("config key `{key}` must be a {expected}, found {found}")]
    Type { key: String, expected: Kind, found: String },
    #[error("config key `{key}` out of range: {reason}")]
    Domain { key: String, reason: String },
    #[error("config is for experiment `{config}` but `{requested}` was requested")]
    ExperimentMismatch { config: String, requested: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Core(#[from] qsim_core::QsimError),
    #[error("could not build thread pool: {0}")]
    Threads(String),
}
