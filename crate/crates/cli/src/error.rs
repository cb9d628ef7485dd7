use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config parse error: {0}")]
    Parse(String),

    #[error("invalid config value `{field}`: {reason}")]
    Validation { field: &'static str, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Model(#[from] transmon_core::Error),

    #[error("JSON serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Prefixes a validation error with its config table.
    pub(crate) fn within(self, table: &str) -> CliError {
        match self {
            CliError::Validation { field, reason } => CliError::Validation {
                field,
                reason: format!("in [{table}]: {reason}"),
            },
            other => other,
        }
    }
}
