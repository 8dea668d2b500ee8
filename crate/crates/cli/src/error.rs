//! CLI error type, its exit-code mapping, and the machine-readable
//! error JSON printed to stderr.

use option_forecast::ForecastError;
use serde::Serialize;
use thiserror::Error;

/// A failed run, classified by exit code: configuration problems exit
/// 2, bad input data exits 3, and internal failures exit 4.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Internal(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "configuration",
            CliError::Data(_) => "data",
            CliError::Internal(_) => "internal",
        }
    }

    /// The `{"error": {...}}` document written to stderr on failure.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Inner<'a> {
            kind: &'a str,
            message: String,
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            error: Inner<'a>,
        }
        let doc = Doc {
            error: Inner { kind: self.kind(), message: self.to_string() },
        };
        serde_json::to_string(&doc).expect("error document always serializes")
    }
}

impl From<ForecastError> for CliError {
    fn from(e: ForecastError) -> Self {
        match e {
            ForecastError::InvalidArgument(_) | ForecastError::Configuration(_) => {
                CliError::Config(e.to_string())
            }
            ForecastError::InsufficientData { .. } => CliError::Data(e.to_string()),
            ForecastError::DegenerateVolatility { .. } | ForecastError::Internal(_) => {
                CliError::Internal(e.to_string())
            }
        }
    }
}
