//! Validation-based window selection and rolling one-step backtests.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ForecastError, Result};
use crate::estimation::estimate_params;
use crate::evaluation::metrics::{wmae, wmape, Side, StepRecord};
use crate::evaluation::{SplitSpec, WindowGrid};
use crate::predictor::{
    predict_analytic, predict_gaussian_quantile, predict_persistence_baseline,
    rolling_diff_sd,
};
use crate::series::{CostWeights, TimeSeries};

/// Which predictor a backtest evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BacktestMethod {
    /// Closed-form cost-minimizing prediction under estimated GBM.
    Option,
    /// Persistence center with a Gaussian quantile shift.
    BaselineQuantile,
    /// Caller-supplied per-step (mean, sd) forecasts.
    External,
}

/// Validation score for one window candidate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowScore {
    pub window: usize,
    pub wmae: f64,
}

/// One aligned external forecast: predictive mean and spread for a
/// single test-segment step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExternalForecast {
    pub mean: f64,
    pub sd: f64,
}

/// Out-of-sample results of a backtest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BacktestReport {
    pub wmae: f64,
    pub wmape: f64,
    /// Window frozen after validation; absent for external forecasts.
    pub chosen_window: Option<usize>,
    /// Validation WMAE per candidate, ordered by window size.
    pub validation_scores: Vec<WindowScore>,
    pub steps: Vec<StepRecord>,
    pub weights: CostWeights,
    pub method: BacktestMethod,
    /// How many predictions the positivity floor replaced.
    pub floored_steps: usize,
}

/// Rolling one-step prediction for target index `k`, using only
/// observations up to `k - 1`.
fn rolling_step(
    series: &TimeSeries,
    window: usize,
    k: usize,
    weights: &CostWeights,
    method: BacktestMethod,
) -> Result<StepRecord> {
    let values = series.values();
    let (predicted, mu_hat, sigma_hat, _floored) =
        rolling_prediction(series, window, k, weights, method)?;
    Ok(StepRecord {
        index: series.origin_index() + k,
        actual: values[k],
        predicted,
        mu_hat,
        sigma_hat,
        side: Side::classify(values[k], predicted),
    })
}

fn rolling_prediction(
    series: &TimeSeries,
    window: usize,
    k: usize,
    weights: &CostWeights,
    method: BacktestMethod,
) -> Result<(f64, f64, f64, bool)> {
    let values = series.values();
    match method {
        BacktestMethod::Option => {
            let (params, _) = estimate_params(series, window, k - 1)?;
            let pred = predict_analytic(values[k - 1], &params, series.dt(), weights)?;
            Ok((pred.k_star, params.mu(), params.sigma(), pred.floored))
        }
        BacktestMethod::BaselineQuantile => {
            let pred = predict_persistence_baseline(series, window, k - 1, weights)?;
            let sd = rolling_diff_sd(series, window, k - 1)?;
            Ok((pred.k_star, values[k - 1], sd, pred.floored))
        }
        BacktestMethod::External => Err(ForecastError::InvalidArgument(
            "external forecasts are scored with evaluate_external".into(),
        )),
    }
}

/// Scores every feasible window candidate on the validation segment
/// and returns the winner (smallest window on ties) with all scores.
pub fn select_window(
    series: &TimeSeries,
    grid: &WindowGrid,
    split: &SplitSpec,
    weights: &CostWeights,
    method: BacktestMethod,
) -> Result<(usize, Vec<WindowScore>)> {
    if method == BacktestMethod::External {
        return Err(ForecastError::InvalidArgument(
            "external forecasts do not use window selection".into(),
        ));
    }
    let (n1, n2) = split.boundaries(series.len())?;
    // At the first validation target n1+1 the window reaches back from
    // n1, so at most n1+1 observations are available.
    let limit = n1 + 1;
    let feasible: Vec<usize> = grid
        .candidates()
        .iter()
        .copied()
        .filter(|&n| n <= limit)
        .collect();
    if feasible.is_empty() {
        return Err(ForecastError::Configuration(format!(
            "no feasible window candidate: the training segment supports windows up to \
             {limit}, but the grid starts at {}",
            grid.candidates()[0]
        )));
    }

    let scores: Vec<WindowScore> = feasible
        .par_iter()
        .map(|&window| -> Result<WindowScore> {
            let steps: Vec<StepRecord> = (n1 + 1..=n2)
                .map(|k| rolling_step(series, window, k, weights, method))
                .collect::<Result<_>>()?;
            Ok(WindowScore { window, wmae: wmae(&steps, weights)? })
        })
        .collect::<Result<_>>()?;

    // Candidates are ascending, so a strict comparison breaks ties
    // toward the smallest window.
    let mut chosen = scores[0];
    for s in &scores[1..] {
        if s.wmae < chosen.wmae {
            chosen = *s;
        }
    }
    Ok((chosen.window, scores))
}

/// Full walk-forward backtest: selects a window on the validation
/// segment, freezes it, and scores rolling predictions over the test
/// segment.
pub fn run_backtest(
    series: &TimeSeries,
    split: &SplitSpec,
    grid: &WindowGrid,
    weights: &CostWeights,
    method: BacktestMethod,
) -> Result<BacktestReport> {
    let (chosen_window, validation_scores) =
        select_window(series, grid, split, weights, method)?;
    let (_, n2) = split.boundaries(series.len())?;

    let mut steps = Vec::with_capacity(series.len() - 1 - n2);
    let mut floored_steps = 0usize;
    for k in n2 + 1..series.len() {
        let values = series.values();
        let (predicted, mu_hat, sigma_hat, floored) =
            rolling_prediction(series, chosen_window, k, weights, method)?;
        if floored {
            floored_steps += 1;
        }
        steps.push(StepRecord {
            index: series.origin_index() + k,
            actual: values[k],
            predicted,
            mu_hat,
            sigma_hat,
            side: Side::classify(values[k], predicted),
        });
    }

    Ok(BacktestReport {
        wmae: wmae(&steps, weights)?,
        wmape: wmape(&steps, weights)?,
        chosen_window: Some(chosen_window),
        validation_scores,
        steps,
        weights: *weights,
        method,
        floored_steps,
    })
}

/// Scores externally produced `(mean, sd)` forecasts aligned
/// one-to-one with the test segment, applying the cost-optimal
/// Gaussian quantile to each.
pub fn evaluate_external(
    series: &TimeSeries,
    forecasts: &[ExternalForecast],
    split: &SplitSpec,
    weights: &CostWeights,
) -> Result<BacktestReport> {
    let (_, n2) = split.boundaries(series.len())?;
    let expected = series.len() - 1 - n2;
    if forecasts.len() != expected {
        return Err(ForecastError::InvalidArgument(format!(
            "external forecasts must align with the test segment: expected {expected}, \
             got {}",
            forecasts.len()
        )));
    }

    let values = series.values();
    let mut steps = Vec::with_capacity(expected);
    let mut floored_steps = 0usize;
    for (i, f) in forecasts.iter().enumerate() {
        let k = n2 + 1 + i;
        let raw = predict_gaussian_quantile(f.mean, f.sd, weights)?;
        // Same positivity floor as the persistence baseline, relative
        // to the last observed level.
        let floor = 1e-9 * values[k - 1];
        let predicted = if raw < floor {
            floored_steps += 1;
            floor
        } else {
            raw
        };
        steps.push(StepRecord {
            index: series.origin_index() + k,
            actual: values[k],
            predicted,
            mu_hat: f.mean,
            sigma_hat: f.sd,
            side: Side::classify(values[k], predicted),
        });
    }

    Ok(BacktestReport {
        wmae: wmae(&steps, weights)?,
        wmape: wmape(&steps, weights)?,
        chosen_window: None,
        validation_scores: Vec::new(),
        steps,
        weights: *weights,
        method: BacktestMethod::External,
        floored_steps,
    })
}
