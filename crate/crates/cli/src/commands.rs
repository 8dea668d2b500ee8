//! The four CLI commands, operating on a resolved [`RunConfig`].
//!
//! Every command is a pure function of the input file bytes and the
//! configuration (plus the seed for simulation), so repeated runs emit
//! bitwise-identical reports.

use option_forecast::{
    estimate_params, evaluate_external, predict_analytic, predict_persistence_baseline,
    rolling_diff_sd, run_backtest, simulate_gbm, BacktestReport, CostWeights, GbmParams,
    Prediction, SplitSpec, TimeSeries,
};

use crate::config::{MethodConfig, RunConfig};
use crate::error::CliError;
use crate::ingest::{ingest_csv, ingest_external};
use crate::report::{
    emit_json, emit_series_csv, write_steps_csv, BacktestDocument, CompareDocument,
    CompareRow, PredictDocument,
};

/// Generates a synthetic GBM series and writes it as `index,value` CSV.
pub fn cmd_simulate(config: RunConfig) -> Result<(), CliError> {
    let params = GbmParams::new(config.sim_mu, config.sim_sigma, 3)?;
    let series = simulate_gbm(config.sim_s0, &params, config.sim_steps, config.dt, config.seed)?;
    emit_series_csv(config.output_path.as_ref(), series.values())
}

fn load_series(config: &RunConfig) -> Result<TimeSeries, CliError> {
    config.validate_epsilon()?;
    let path = config.input_path()?;
    ingest_csv(path, &config.value_column, config.dt, config.epsilon_shift)
}

fn predict_tail(
    config: &RunConfig,
    series: &TimeSeries,
    weights: &CostWeights,
) -> Result<(Prediction, f64, f64), CliError> {
    let window = config.window.ok_or_else(|| {
        CliError::Config("window is required for one-shot prediction".into())
    })?;
    let last = series.len() - 1;
    match config.method {
        MethodConfig::Option => {
            let (params, _) = estimate_params(series, window, last)?;
            let prediction = predict_analytic(series.last(), &params, series.dt(), weights)?;
            Ok((prediction, params.mu(), params.sigma()))
        }
        MethodConfig::Persistence => {
            let prediction = predict_persistence_baseline(series, window, last, weights)?;
            let sd = rolling_diff_sd(series, window, last)?;
            Ok((prediction, series.last(), sd))
        }
        MethodConfig::External => Err(CliError::Config(
            "the external method only applies to backtest and compare".into(),
        )),
    }
}

/// One-step-ahead prediction from the series tail.
pub fn cmd_predict(mut config: RunConfig) -> Result<(), CliError> {
    let weights = config.resolve_weights()?;
    let series = load_series(&config)?;
    let (prediction, mu_hat, sigma_hat) = predict_tail(&config, &series, &weights)?;

    // Predictions are made in shifted units; undo the shift for the
    // reported level, clamping at zero.
    let k_star = (prediction.k_star - config.epsilon_shift).max(0.0);
    let doc = PredictDocument {
        k_star,
        mu_hat,
        sigma_hat,
        fractile: prediction.fractile,
        expected_cost: prediction.expected_cost,
        config: config.clone(),
    };
    emit_json(config.output_path.as_ref(), &doc)
}

fn backtest_with_method(
    config: &RunConfig,
    series: &TimeSeries,
    split: &SplitSpec,
    weights: &CostWeights,
    method: MethodConfig,
) -> Result<BacktestReport, CliError> {
    match method {
        MethodConfig::External => {
            let path = config.external_path.as_ref().ok_or_else(|| {
                CliError::Config("external_path is required for the external method".into())
            })?;
            let forecasts = ingest_external(path)?;
            Ok(evaluate_external(series, &forecasts, split, weights)?)
        }
        _ => {
            let grid = config.window_grid.resolve(series.len(), split)?;
            Ok(run_backtest(
                series,
                split,
                &grid,
                weights,
                method.as_backtest_method(),
            )?)
        }
    }
}

/// Full walk-forward backtest; JSON aggregates plus optional step CSV.
pub fn cmd_backtest(mut config: RunConfig) -> Result<(), CliError> {
    let weights = config.resolve_weights()?;
    let split = config.split()?;
    let series = load_series(&config)?;
    let report = backtest_with_method(&config, &series, &split, &weights, config.method)?;

    // Default the step CSV next to the JSON report when a report path
    // exists; stdout-only runs skip the CSV.
    let steps_path = config.steps_path.clone().or_else(|| {
        config
            .output_path
            .as_ref()
            .map(|p| p.with_extension("steps.csv"))
    });
    if let Some(path) = &steps_path {
        write_steps_csv(path, &report.steps)?;
    }

    let doc = BacktestDocument {
        chosen_window: report.chosen_window,
        validation_scores: report.validation_scores,
        wmae: report.wmae,
        wmape: report.wmape,
        floored_steps: report.floored_steps,
        steps_path,
        config: config.clone(),
    };
    emit_json(config.output_path.as_ref(), &doc)
}

/// WMAE/WMAPE for every configured method at every configured cost
/// ratio, one row per (omega, method) pair.
pub fn cmd_compare(config: RunConfig) -> Result<(), CliError> {
    config.validate_epsilon()?;
    let split = config.split()?;
    let series = load_series(&config)?;

    let mut methods = vec![MethodConfig::Option, MethodConfig::Persistence];
    if config.external_path.is_some() {
        methods.push(MethodConfig::External);
    }

    let mut rows = Vec::with_capacity(config.omegas.len() * methods.len());
    for &omega in &config.omegas {
        let weights = CostWeights::from_omega(omega)?;
        for &method in &methods {
            let report = backtest_with_method(&config, &series, &split, &weights, method)?;
            rows.push(CompareRow {
                omega,
                method: method.name(),
                chosen_window: report.chosen_window,
                wmae: report.wmae,
                wmape: report.wmape,
            });
        }
    }

    let doc = CompareDocument { config: config.clone(), rows };
    emit_json(config.output_path.as_ref(), &doc)
}
