//! CSV ingestion with row-numbered diagnostics.
//!
//! Input files need a header row. The value column (default `value`)
//! must hold positive decimals; a column named `index` or `timestamp`,
//! when present, is only checked for strictly increasing order. Row
//! numbers in errors count data rows from 1, excluding the header.

use std::path::Path;

use option_forecast::{ExternalForecast, TimeSeries};

use crate::error::CliError;

fn open_reader(path: &Path) -> Result<csv::Reader<std::fs::File>, CliError> {
    let file = std::fs::File::open(path).map_err(|e| {
        CliError::Data(format!("cannot open input file {}: {e}", path.display()))
    })?;
    Ok(csv::ReaderBuilder::new().has_headers(true).from_reader(file))
}

fn column_position(
    headers: &csv::StringRecord,
    name: &str,
    path: &Path,
) -> Result<usize, CliError> {
    headers.iter().position(|h| h == name).ok_or_else(|| {
        CliError::Data(format!(
            "column '{name}' not found in {}; available columns: {}",
            path.display(),
            headers.iter().collect::<Vec<_>>().join(", ")
        ))
    })
}

fn parse_cell(raw: &str, row: usize, column: &str) -> Result<f64, CliError> {
    raw.trim().parse::<f64>().map_err(|_| {
        CliError::Data(format!(
            "data row {row}, column '{column}': could not parse '{raw}' as a number"
        ))
    })
}

/// Reads a positive time series, applying the epsilon shift before the
/// positivity check so zero-valued rows survive when a shift is
/// configured.
pub fn ingest_csv(
    path: &Path,
    value_column: &str,
    dt: f64,
    epsilon_shift: f64,
) -> Result<TimeSeries, CliError> {
    let mut reader = open_reader(path)?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::Data(format!("cannot read header of {}: {e}", path.display())))?
        .clone();
    let value_pos = column_position(&headers, value_column, path)?;
    let order_pos = headers
        .iter()
        .position(|h| h == "index" || h == "timestamp")
        .filter(|&pos| pos != value_pos);

    let mut values = Vec::new();
    let mut previous_order: Option<f64> = None;
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record
            .map_err(|e| CliError::Data(format!("data row {row}: malformed CSV: {e}")))?;

        if let Some(pos) = order_pos {
            let cell = record.get(pos).ok_or_else(|| {
                CliError::Data(format!("data row {row}: missing order column"))
            })?;
            let order = parse_cell(cell, row, &headers[pos])?;
            if let Some(prev) = previous_order {
                if order <= prev {
                    return Err(CliError::Data(format!(
                        "data row {row}: order column must be strictly increasing \
                         ({order} follows {prev})"
                    )));
                }
            }
            previous_order = Some(order);
        }

        let cell = record.get(value_pos).ok_or_else(|| {
            CliError::Data(format!("data row {row}: missing column '{value_column}'"))
        })?;
        let value = parse_cell(cell, row, value_column)? + epsilon_shift;
        if !(value.is_finite() && value > 0.0) {
            return Err(CliError::Data(format!(
                "data row {row}, column '{value_column}': value must be positive after \
                 an epsilon shift of {epsilon_shift}, got {value}"
            )));
        }
        values.push(value);
    }

    TimeSeries::new(values, dt).map_err(|e| CliError::Data(e.to_string()))
}

/// Reads external (mean, sd) forecasts from a CSV with `mean` and `sd`
/// columns.
pub fn ingest_external(path: &Path) -> Result<Vec<ExternalForecast>, CliError> {
    let mut reader = open_reader(path)?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::Data(format!("cannot read header of {}: {e}", path.display())))?
        .clone();
    let mean_pos = column_position(&headers, "mean", path)?;
    let sd_pos = column_position(&headers, "sd", path)?;

    let mut forecasts = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record
            .map_err(|e| CliError::Data(format!("data row {row}: malformed CSV: {e}")))?;
        let mean = parse_cell(record.get(mean_pos).unwrap_or(""), row, "mean")?;
        let sd = parse_cell(record.get(sd_pos).unwrap_or(""), row, "sd")?;
        if !mean.is_finite() {
            return Err(CliError::Data(format!(
                "data row {row}, column 'mean': must be finite, got {mean}"
            )));
        }
        if !(sd.is_finite() && sd >= 0.0) {
            return Err(CliError::Data(format!(
                "data row {row}, column 'sd': must be nonnegative and finite, got {sd}"
            )));
        }
        forecasts.push(ExternalForecast { mean, sd });
    }
    Ok(forecasts)
}
