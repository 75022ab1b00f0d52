use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::experiments::Experiment;

pub const SCHEMA_VERSION: u32 = 1;
pub const OUT_DIR_ENV: &str = "PATHQUANT_OUT_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema_version: u32,
    /// Every random draw in the run derives from this value.
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub experiments: Vec<Experiment>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("pathquant-out")
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| CliError::ReadConfig { path: path.into(), source })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::SchemaVersion { found: self.schema_version, expected: SCHEMA_VERSION });
        }
        for (index, e) in self.experiments.iter().enumerate() {
            e.validate().map_err(|message| CliError::Invalid { index, name: e.name(), message })?;
        }
        Ok(())
    }

    /// `--out`, then the environment override, then the config value.
    pub fn resolve_output_dir(&self, cli: Option<&Path>) -> PathBuf {
        if let Some(p) = cli {
            return p.into();
        }
        match std::env::var_os(OUT_DIR_ENV) {
            Some(v) if !v.is_empty() => PathBuf::from(v),
            _ => self.output_dir.clone(),
        }
    }
}
