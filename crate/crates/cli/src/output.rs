use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::CliError;
use crate::experiments::Table;

pub fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|source| CliError::Write { path: path.into(), source })
}

pub fn write_table(dir: &Path, t: &Table) -> Result<String, CliError> {
    let file = format!("{}.csv", t.name);
    let path = dir.join(&file);
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(&t.header)?;
    for row in &t.rows {
        w.write_record(row)?;
    }
    w.flush().map_err(|source| CliError::Write { path: path.clone(), source })?;
    Ok(file)
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|source| CliError::Write { path: path.into(), source })
}
