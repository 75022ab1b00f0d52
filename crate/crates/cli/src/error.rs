use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read config {path}: {source}")]
    ReadConfig { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported schema_version {found}, expected {expected}")]
    SchemaVersion { found: u32, expected: u32 },
    #[error("experiment {index} ({name}): {message}")]
    Invalid { index: usize, name: &'static str, message: String },
    #[error("--jobs must be at least 1")]
    Jobs,
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 2 for validation failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::ReadConfig { .. } | Self::Write { .. } | Self::Csv(_) => 1,
            Self::Parse(_) | Self::SchemaVersion { .. } | Self::Invalid { .. } | Self::Jobs => 2,
        }
    }
}
