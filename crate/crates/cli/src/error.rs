use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: u64, message: String },

    #[error("{transform} is undefined for {count} cell(s): {listing}")]
    Domain {
        transform: &'static str,
        count: usize,
        listing: String,
    },

    #[error(transparent)]
    Analysis(#[from] centerlab_core::Error),

    #[error("{0}")]
    Validation(String),

    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// Stable identifier used in the machine-readable error report.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Parse { .. } | CliError::Csv(_) => "parse",
            CliError::Domain { .. } => "domain",
            CliError::Analysis(_) => "analysis",
            CliError::Validation(_) => "validation",
            CliError::Json(_) => "serialization",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
