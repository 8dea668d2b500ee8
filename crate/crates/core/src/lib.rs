//! Asymmetric-cost forecasting for positive time series under a
//! geometric Brownian motion model.
//!
//! The pipeline has four stages, one module each:
//!
//! - [`series`]: series containers, cost weights and exact GBM
//!   simulation.
//! - [`estimation`]: rolling maximum-likelihood estimates of drift and
//!   volatility from log returns.
//! - [`pricer`]: the expected-shortfall ("real option") value of
//!   committing to a level `K` one step ahead, plus the normal CDF and
//!   quantile routines it rests on.
//! - [`predictor`]: the prediction that minimizes expected asymmetric
//!   cost, available in closed form, by root finding, and as a
//!   Gaussian-quantile baseline.
//!
//! [`evaluation`] ties the stages together into a walk-forward backtest
//! with validation-based window selection.
//!
//! ```
//! use option_forecast::{
//!     estimate_params, predict_analytic, simulate_gbm, CostWeights, GbmParams,
//! };
//!
//! // Simulate a path, fit a rolling window, predict one step ahead
//! // with underestimation 15% more costly than overestimation.
//! let truth = GbmParams::new(0.05, 0.2, 3)?;
//! let series = simulate_gbm(100.0, &truth, 500, 1.0, 7)?;
//! let (params, _) = estimate_params(&series, 250, series.len() - 1)?;
//! let weights = CostWeights::from_omega(1.15)?;
//! let next = predict_analytic(series.last(), &params, series.dt(), &weights)?;
//! assert!(next.k_star > series.last() * 0.5);
//! # Ok::<(), option_forecast::ForecastError>(())
//! ```

pub mod error;
pub mod estimation;
pub mod evaluation;
pub mod predictor;
pub mod pricer;
pub mod series;

pub use error::{ForecastError, Result};
pub use estimation::{
    estimate_params, estimate_params_with, EstimateDiagnostics, VarianceDivisor,
};
pub use evaluation::{
    evaluate_external, run_backtest, select_window, wmae, wmape, BacktestMethod,
    BacktestReport, ExternalForecast, Side, SplitSpec, StepRecord, WindowGrid,
    WindowScore,
};
pub use predictor::{
    expected_cost, predict_analytic, predict_gaussian_quantile, predict_numeric,
    predict_persistence_baseline, predict_persistence_baseline_with_floor,
    rolling_diff_sd, Prediction, PredictionMethod,
};
pub use pricer::{d_terms, norm_cdf, norm_ppf, option_value, OptionQuote};
pub use series::{
    log_returns, simulate_gbm, BrownianIncrement, CostWeights, GbmParams, TimeSeries,
};
