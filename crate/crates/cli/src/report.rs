//! Report documents and atomic file emission.
//!
//! Every JSON report embeds the resolved [`RunConfig`] so a result file
//! is self-describing. Files are written to a temporary sibling and
//! renamed into place, so error paths never leave partial output.

use std::io::Write;
use std::path::{Path, PathBuf};

use option_forecast::{StepRecord, WindowScore};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;

pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| {
        CliError::Internal(format!(
            "cannot create temporary file next to {}: {e}",
            path.display()
        ))
    })?;
    tmp.write_all(bytes).map_err(|e| {
        CliError::Internal(format!("cannot write {}: {e}", path.display()))
    })?;
    tmp.persist(path).map_err(|e| {
        CliError::Internal(format!("cannot finalize {}: {e}", path.display()))
    })?;
    Ok(())
}

/// Serializes a report as pretty JSON to the given path, or to stdout
/// when no path is configured.
pub fn emit_json<T: Serialize>(path: Option<&PathBuf>, doc: &T) -> Result<(), CliError> {
    let mut json = serde_json::to_string_pretty(doc)
        .map_err(|e| CliError::Internal(format!("cannot serialize report: {e}")))?;
    json.push('\n');
    match path {
        Some(p) => atomic_write(p, json.as_bytes()),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

/// Writes per-step records as CSV with the header
/// `index,actual,predicted,mu_hat,sigma_hat,side`.
pub fn write_steps_csv(path: &Path, steps: &[StepRecord]) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for step in steps {
        writer.serialize(step).map_err(|e| {
            CliError::Internal(format!("cannot serialize step record: {e}"))
        })?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::Internal(format!("cannot flush step records: {e}")))?;
    atomic_write(path, &bytes)
}

/// Writes a simulated series as CSV with the header `index,value`, or
/// to stdout when no path is configured.
pub fn emit_series_csv(path: Option<&PathBuf>, values: &[f64]) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["index", "value"])
        .and_then(|_| {
            for (i, v) in values.iter().enumerate() {
                writer.serialize((i, v))?;
            }
            Ok(())
        })
        .map_err(|e| CliError::Internal(format!("cannot serialize series: {e}")))?;
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::Internal(format!("cannot flush series: {e}")))?;
    match path {
        Some(p) => atomic_write(p, &bytes),
        None => {
            std::io::stdout()
                .write_all(&bytes)
                .map_err(|e| CliError::Internal(format!("cannot write stdout: {e}")))?;
            Ok(())
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PredictDocument {
    pub config: RunConfig,
    pub k_star: f64,
    pub mu_hat: f64,
    pub sigma_hat: f64,
    pub fractile: f64,
    pub expected_cost: f64,
}

#[derive(Debug, Serialize)]
pub struct BacktestDocument {
    pub config: RunConfig,
    pub chosen_window: Option<usize>,
    pub validation_scores: Vec<WindowScore>,
    pub wmae: f64,
    pub wmape: f64,
    pub floored_steps: usize,
    pub steps_path: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct CompareDocument {
    pub config: RunConfig,
    pub rows: Vec<CompareRow>,
}

/// One method at one cost ratio, mirroring a table cell pair.
#[derive(Debug, Serialize)]
pub struct CompareRow {
    pub omega: f64,
    pub method: &'static str,
    pub chosen_window: Option<usize>,
    pub wmae: f64,
    pub wmape: f64,
}
