//! Weighted absolute error metrics over backtest steps.
//!
//! Underestimation (actual above predicted) is weighted by the cost
//! ratio `omega`; overestimation carries weight one; exact hits
//! contribute nothing. `wmae` averages the weighted absolute error,
//! `wmape` the same normalized by the actual level.

use serde::{Deserialize, Serialize};

use crate::error::{ForecastError, Result};
use crate::series::CostWeights;

/// Which side of the actual value a prediction landed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Over,
    Under,
    Exact,
}

impl Side {
    /// `Under` iff the actual exceeds the prediction.
    pub fn classify(actual: f64, predicted: f64) -> Self {
        if actual > predicted {
            Side::Under
        } else if actual < predicted {
            Side::Over
        } else {
            Side::Exact
        }
    }
}

/// One out-of-sample step of a backtest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// Index of the target observation in the original series.
    pub index: usize,
    pub actual: f64,
    pub predicted: f64,
    /// Drift estimate (or baseline center) the prediction used.
    pub mu_hat: f64,
    /// Volatility estimate (or baseline spread) the prediction used.
    pub sigma_hat: f64,
    pub side: Side,
}

fn weighted_terms<'a>(
    steps: &'a [StepRecord],
    weights: &CostWeights,
) -> Result<impl Iterator<Item = (f64, f64)> + 'a> {
    if steps.is_empty() {
        return Err(ForecastError::InvalidArgument(
            "cannot score an empty set of steps".into(),
        ));
    }
    let omega = weights.omega();
    Ok(steps.iter().map(move |r| {
        let diff = r.actual - r.predicted;
        let term = if diff > 0.0 { omega * diff } else { -diff };
        (term, r.actual)
    }))
}

/// Mean weighted absolute error.
pub fn wmae(steps: &[StepRecord], weights: &CostWeights) -> Result<f64> {
    let n = steps.len() as f64;
    Ok(weighted_terms(steps, weights)?.map(|(term, _)| term).sum::<f64>() / n)
}

/// Mean weighted absolute percentage error (each term normalized by
/// the actual value, which must be positive).
pub fn wmape(steps: &[StepRecord], weights: &CostWeights) -> Result<f64> {
    if let Some(bad) = steps.iter().find(|r| !(r.actual.is_finite() && r.actual > 0.0)) {
        return Err(ForecastError::InvalidArgument(format!(
            "actual at index {} must be positive and finite for wmape, got {}",
            bad.index, bad.actual
        )));
    }
    let n = steps.len() as f64;
    Ok(weighted_terms(steps, weights)?
        .map(|(term, actual)| term / actual)
        .sum::<f64>()
        / n)
}
