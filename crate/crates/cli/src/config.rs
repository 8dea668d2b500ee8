//! Run configuration: defaults, JSON config files, and flag overrides.
//!
//! Precedence is flags over config file over defaults. The resolved
//! configuration is embedded verbatim in every JSON report, and it
//! round-trips through serialization unchanged.

use std::path::PathBuf;

use option_forecast::{BacktestMethod, CostWeights, SplitSpec, WindowGrid};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Window grid selection: the literal string `"auto"` or an explicit
/// candidate list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WindowGridConfig {
    Keyword(GridKeyword),
    Explicit(Vec<usize>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKeyword {
    Auto,
}

impl Default for WindowGridConfig {
    fn default() -> Self {
        WindowGridConfig::Keyword(GridKeyword::Auto)
    }
}

impl WindowGridConfig {
    /// Parses a `--window-grid` flag: `auto` or a comma-separated list.
    pub fn parse_flag(raw: &str) -> Result<Self, CliError> {
        if raw.trim().eq_ignore_ascii_case("auto") {
            return Ok(WindowGridConfig::Keyword(GridKeyword::Auto));
        }
        let candidates = raw
            .split(',')
            .map(|part| {
                part.trim().parse::<usize>().map_err(|_| {
                    CliError::Config(format!(
                        "window grid must be 'auto' or a comma-separated list of \
                         integers, got '{raw}'"
                    ))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(WindowGridConfig::Explicit(candidates))
    }

    /// Materializes the grid for a series of the given length.
    pub fn resolve(&self, series_len: usize, split: &SplitSpec) -> Result<WindowGrid, CliError> {
        match self {
            WindowGridConfig::Keyword(GridKeyword::Auto) => {
                Ok(WindowGrid::auto(series_len, split)?)
            }
            WindowGridConfig::Explicit(candidates) => {
                Ok(WindowGrid::new(candidates.iter().copied())?)
            }
        }
    }
}

/// Prediction method named in configs and flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodConfig {
    Option,
    Persistence,
    External,
}

impl MethodConfig {
    pub fn parse_flag(raw: &str) -> Result<Self, CliError> {
        match raw.trim().to_ascii_lowercase().as_str() {
            "option" => Ok(MethodConfig::Option),
            "persistence" => Ok(MethodConfig::Persistence),
            "external" => Ok(MethodConfig::External),
            other => Err(CliError::Config(format!(
                "method must be option, persistence, or external, got '{other}'"
            ))),
        }
    }

    pub fn as_backtest_method(self) -> BacktestMethod {
        match self {
            MethodConfig::Option => BacktestMethod::Option,
            MethodConfig::Persistence => BacktestMethod::BaselineQuantile,
            MethodConfig::External => BacktestMethod::External,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MethodConfig::Option => "option",
            MethodConfig::Persistence => "persistence",
            MethodConfig::External => "external",
        }
    }
}

/// Everything a run needs, with serde defaults so config files may be
/// sparse. Unknown keys are rejected to catch typos early.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input_path: Option<PathBuf>,
    pub value_column: String,
    pub dt: f64,
    pub p_over: f64,
    pub p_under: f64,
    /// Direct cost ratio; when set it wins over p_over/p_under and
    /// implies p_over = 1.
    pub omega: Option<f64>,
    pub train_frac: f64,
    pub valid_frac: f64,
    pub test_frac: f64,
    pub window_grid: WindowGridConfig,
    /// Estimation window for one-shot prediction.
    pub window: Option<usize>,
    pub method: MethodConfig,
    pub epsilon_shift: f64,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
    pub steps_path: Option<PathBuf>,
    /// Cost ratios swept by the compare command.
    pub omegas: Vec<f64>,
    /// Aligned (mean, sd) forecasts for the external method.
    pub external_path: Option<PathBuf>,
    pub sim_s0: f64,
    pub sim_mu: f64,
    pub sim_sigma: f64,
    pub sim_steps: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input_path: None,
            value_column: "value".to_string(),
            dt: 1.0,
            p_over: 1.0,
            p_under: 1.0,
            omega: None,
            train_frac: 0.5,
            valid_frac: 0.2,
            test_frac: 0.3,
            window_grid: WindowGridConfig::default(),
            window: None,
            method: MethodConfig::Option,
            epsilon_shift: 0.0,
            seed: 0,
            output_path: None,
            steps_path: None,
            omegas: vec![1.0 / 1.15, 1.0, 1.15],
            external_path: None,
            sim_s0: 100.0,
            sim_mu: 0.0,
            sim_sigma: 0.1,
            sim_steps: 250,
        }
    }
}

impl RunConfig {
    /// Loads a JSON config file, or the defaults when no path is given.
    pub fn load(path: Option<&PathBuf>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let raw = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config file {}: {e}", path.display()))
        })?;
        serde_json::from_str(&raw).map_err(|e| {
            CliError::Config(format!("invalid config file {}: {e}", path.display()))
        })
    }

    /// Normalized weights: a direct `omega` takes precedence and sets
    /// `p_over = 1`. The resolved pair is written back so reports embed
    /// what was actually used.
    pub fn resolve_weights(&mut self) -> Result<CostWeights, CliError> {
        let weights = match self.omega {
            Some(omega) => CostWeights::from_omega(omega)?,
            None => CostWeights::new(self.p_over, self.p_under)?,
        };
        self.p_over = weights.p_over();
        self.p_under = weights.p_under();
        Ok(weights)
    }

    pub fn split(&self) -> Result<SplitSpec, CliError> {
        Ok(SplitSpec::new(self.train_frac, self.valid_frac, self.test_frac)?)
    }

    pub fn input_path(&self) -> Result<&PathBuf, CliError> {
        self.input_path
            .as_ref()
            .ok_or_else(|| CliError::Config("input_path is required".into()))
    }

    pub fn validate_epsilon(&self) -> Result<(), CliError> {
        if !(self.epsilon_shift.is_finite() && self.epsilon_shift >= 0.0) {
            return Err(CliError::Config(format!(
                "epsilon_shift must be nonnegative and finite, got {}",
                self.epsilon_shift
            )));
        }
        Ok(())
    }
}
