//! Maximum-likelihood drift and volatility estimation from a rolling
//! window of log returns.
//!
//! For a window of `n` observations ending at `at_index` the estimator
//! consumes the `m = n - 1` consecutive log returns `r_i`:
//!
//! ```text
//! sigma_hat = sqrt( (1/m) * sum (r_i - r_bar)^2 ) / sqrt(dt)
//! mu_hat    = r_bar / dt + sigma_hat^2 / 2
//! ```
//!
//! The `1/m` divisor is the maximum-likelihood normalization; the
//! unbiased `1/(m-1)` variant is available through
//! [`estimate_params_with`]. The `sigma_hat^2 / 2` term converts the
//! mean log return back to the level drift `mu` (the log of a lognormal
//! grows at `mu - sigma^2/2`, not `mu`). With `dt = 1` both formulas
//! reduce to the per-step estimators.

use crate::error::{ForecastError, Result};
use crate::series::{GbmParams, TimeSeries};

/// Divisor used for the return variance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VarianceDivisor {
    /// Divide by the number of returns `m` (maximum likelihood).
    #[default]
    MaximumLikelihood,
    /// Divide by `m - 1` (unbiased sample variance).
    Unbiased,
}

/// Side information about one estimate.
///
/// The standard errors are the usual large-sample approximations
/// `se(sigma_hat) = sigma_hat / sqrt(2m)` and
/// `se(mu_hat) = sigma_hat / sqrt(m * dt)` with `m = n_used - 1`
/// returns; they are what consistency tests check recovery against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateDiagnostics {
    /// Number of observations actually used (equals the requested window).
    pub n_used: usize,
    pub sigma_se: f64,
    pub mu_se: f64,
}

/// Maximum-likelihood estimate from the `window` most recent
/// observations ending at `at_index` (inclusive).
pub fn estimate_params(
    series: &TimeSeries,
    window: usize,
    at_index: usize,
) -> Result<(GbmParams, EstimateDiagnostics)> {
    estimate_params_with(series, window, at_index, VarianceDivisor::MaximumLikelihood)
}

/// [`estimate_params`] with an explicit variance divisor.
pub fn estimate_params_with(
    series: &TimeSeries,
    window: usize,
    at_index: usize,
    divisor: VarianceDivisor,
) -> Result<(GbmParams, EstimateDiagnostics)> {
    if window < 3 {
        return Err(ForecastError::InvalidArgument(format!(
            "window must be at least 3, got {window}"
        )));
    }
    if at_index >= series.len() {
        return Err(ForecastError::InvalidArgument(format!(
            "at_index {at_index} is out of range for a series of length {}",
            series.len()
        )));
    }
    if at_index + 1 < window {
        return Err(ForecastError::InsufficientData {
            needed: window,
            available: at_index + 1,
        });
    }

    let dt = series.dt();
    let slice = &series.values()[at_index + 1 - window..=at_index];
    let m = window - 1;
    let returns: Vec<f64> = slice.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
    let mean = returns.iter().sum::<f64>() / m as f64;
    let ss: f64 = returns.iter().map(|r| (r - mean) * (r - mean)).sum();
    let denom = match divisor {
        VarianceDivisor::MaximumLikelihood => m,
        VarianceDivisor::Unbiased => m - 1,
    };
    let var_step = ss / denom as f64;
    let sigma = (var_step / dt).sqrt();
    let mu = mean / dt + 0.5 * sigma * sigma;

    let params = GbmParams::new(mu, sigma, window)?;
    let diagnostics = EstimateDiagnostics {
        n_used: window,
        sigma_se: sigma / (2.0 * m as f64).sqrt(),
        mu_se: sigma / (m as f64 * dt).sqrt(),
    };
    Ok((params, diagnostics))
}
