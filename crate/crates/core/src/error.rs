use std::path::PathBuf;

use thiserror::Error;

/// Errors produced across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("resource limit exceeded: {what} needs {requested}, limit is {limit}")]
    ResourceLimit {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("evaluation failed at generation {generation}, individual {individual}: {source}")]
    Evaluation {
        generation: usize,
        individual: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("non-finite objective value at iteration {iteration}: {value}")]
    NonFinite { iteration: usize, value: f64 },

    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error("unsupported schema version {found} (expected {expected})")]
    Schema { found: String, expected: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short category name used by the command line front end.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::InvalidState(_) => "invalid-state",
            Error::ResourceLimit { .. } => "resource-limit",
            Error::Evaluation { .. } | Error::NonFinite { .. } => "evaluation",
            Error::Config(_) => "config",
            Error::Schema { .. } | Error::Format { .. } => "format",
            Error::Io { .. } => "io",
        }
    }

    /// Process exit code for the category.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) | Error::Config(_) => 2,
            Error::ResourceLimit { .. } => 3,
            Error::Io { .. } => 4,
            Error::Schema { .. } | Error::Format { .. } => 5,
            Error::InvalidState(_) | Error::Evaluation { .. } | Error::NonFinite { .. } => 6,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
