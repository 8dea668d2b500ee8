//! Cost-minimizing one-step-ahead point predictions.
//!
//! Overestimating by one unit costs `p_over`, underestimating costs
//! `p_under = omega * p_over`. Writing `F(K)` for the priced payoff
//! `E[max(S(t+dt) - K, 0)]`, the expected penalty of announcing `K` is
//!
//! ```text
//! cost(K) = p_over * ((1 + omega) F(K) + K - S e^{mu dt})
//! ```
//!
//! Differentiating with `dF/dK = -N(d2)` gives the first-order condition
//! `N(d2(K*)) = 1 / (1 + omega)`, i.e. the optimal prediction is the
//! `omega / (1 + omega)` quantile of the one-step-ahead lognormal:
//!
//! ```text
//! K* = S exp((mu - sigma^2/2) dt + sigma sqrt(dt) * Phi^{-1}(omega / (1 + omega)))
//! ```
//!
//! [`predict_analytic`] evaluates that closed form;
//! [`predict_numeric`] instead root-finds the first-order condition and
//! exists as an independent route for cross-checking. A model-free
//! persistence baseline ([`predict_persistence_baseline`]) applies the
//! same quantile shift to a Gaussian centered on the last observation.

use serde::Serialize;

use crate::error::{ForecastError, Result};
use crate::pricer::{inv_phi, norm_pdf, option_value, phi, DEGENERATE_VOL_THRESHOLD};
use crate::series::{CostWeights, GbmParams, TimeSeries};

/// How a prediction was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PredictionMethod {
    Analytic,
    Numeric,
    BaselineQuantile,
}

/// A point prediction and the objective value it attains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prediction {
    /// Predicted level for the next step.
    pub k_star: f64,
    pub method: PredictionMethod,
    /// Expected penalty at `k_star` under the method's predictive
    /// density, in units of `p_over`.
    pub expected_cost: f64,
    /// Target quantile `omega / (1 + omega)`.
    pub fractile: f64,
    /// Whether the positivity floor replaced a nonpositive raw value.
    pub floored: bool,
}

fn fractile(weights: &CostWeights) -> Result<f64> {
    let omega = weights.omega();
    let f = omega / (1.0 + omega);
    if f > 0.0 && f < 1.0 {
        Ok(f)
    } else {
        Err(ForecastError::InvalidArgument(format!(
            "cost ratio {omega} pushes the target fractile to {f}, outside (0, 1)"
        )))
    }
}

/// Expected penalty of announcing `k`, in units of `p_over`
/// (multiplied by `p_over`, so symmetric unit weights give the plain
/// expected absolute error).
pub fn expected_cost(
    k: f64,
    s: f64,
    params: &GbmParams,
    dt: f64,
    weights: &CostWeights,
) -> Result<f64> {
    if !(k.is_finite() && k > 0.0) {
        return Err(ForecastError::InvalidArgument(format!(
            "prediction must be positive and finite, got {k}"
        )));
    }
    let omega = weights.omega();
    let quote = option_value(s, k, params, dt)?;
    let cost = weights.p_over() * ((1.0 + omega) * quote.value + k - s * quote.growth);
    // The objective is an expectation of nonnegative penalties; clamp
    // the last-ulp negatives that surface near the deterministic optimum.
    Ok(cost.max(0.0))
}

/// Closed-form minimizer of the expected penalty.
pub fn predict_analytic(
    s: f64,
    params: &GbmParams,
    dt: f64,
    weights: &CostWeights,
) -> Result<Prediction> {
    analytic_with_method(s, params, dt, weights, PredictionMethod::Analytic)
}

fn analytic_with_method(
    s: f64,
    params: &GbmParams,
    dt: f64,
    weights: &CostWeights,
    method: PredictionMethod,
) -> Result<Prediction> {
    validate_spot_dt(s, dt)?;
    let f = fractile(weights)?;
    let v = params.sigma() * dt.sqrt();
    let k_star = if v < DEGENERATE_VOL_THRESHOLD {
        s * (params.mu() * dt).exp()
    } else {
        let m = (params.mu() - 0.5 * params.sigma() * params.sigma()) * dt;
        s * (m + v * inv_phi(f)).exp()
    };
    let cost = expected_cost(k_star, s, params, dt, weights)?;
    Ok(Prediction {
        k_star,
        method,
        expected_cost: cost,
        fractile: f,
        floored: false,
    })
}

/// Minimizes the expected penalty by root-finding the first-order
/// condition `1 - (1 + omega) N(d2(K)) = 0` to relative tolerance
/// `tol` on a bracket spanning ten volatilities either side of the
/// lognormal median. Exists as an independent check on
/// [`predict_analytic`]; degenerate volatility takes the same
/// deterministic shortcut without invoking the root-finder.
pub fn predict_numeric(
    s: f64,
    params: &GbmParams,
    dt: f64,
    weights: &CostWeights,
    tol: f64,
) -> Result<Prediction> {
    if !(tol.is_finite() && tol > 0.0 && tol < 1.0) {
        return Err(ForecastError::InvalidArgument(format!(
            "tol must lie in (0, 1), got {tol}"
        )));
    }
    validate_spot_dt(s, dt)?;
    let f = fractile(weights)?;
    let v = params.sigma() * dt.sqrt();
    if v < DEGENERATE_VOL_THRESHOLD {
        return analytic_with_method(s, params, dt, weights, PredictionMethod::Numeric);
    }

    let omega = weights.omega();
    let m = (params.mu() - 0.5 * params.sigma() * params.sigma()) * dt;
    let lo = s * (m - 10.0 * v).exp();
    let hi = s * (m + 10.0 * v).exp();
    let g = |k: f64| 1.0 - (1.0 + omega) * phi(((s / k).ln() + m) / v);
    let (glo, ghi) = (g(lo), g(hi));
    if !(glo <= 0.0 && ghi >= 0.0) {
        return Err(ForecastError::Internal(format!(
            "first-order condition not bracketed: g({lo}) = {glo}, g({hi}) = {ghi}"
        )));
    }
    let k_star = brent_root(g, lo, hi, tol, 200)?;
    let cost = expected_cost(k_star, s, params, dt, weights)?;
    Ok(Prediction {
        k_star,
        method: PredictionMethod::Numeric,
        expected_cost: cost,
        fractile: f,
        floored: false,
    })
}

/// Quantile of a Gaussian predictive density `N(mu_a, sigma_a^2)` at
/// the cost-optimal fractile. Returns the raw quantile; it may be
/// nonpositive for wide densities near zero, and callers that need a
/// positive level apply their own floor.
pub fn predict_gaussian_quantile(
    mu_a: f64,
    sigma_a: f64,
    weights: &CostWeights,
) -> Result<f64> {
    if !mu_a.is_finite() {
        return Err(ForecastError::InvalidArgument(format!(
            "mu_a must be finite, got {mu_a}"
        )));
    }
    if !(sigma_a.is_finite() && sigma_a >= 0.0) {
        return Err(ForecastError::InvalidArgument(format!(
            "sigma_a must be nonnegative and finite, got {sigma_a}"
        )));
    }
    let f = fractile(weights)?;
    Ok(mu_a + sigma_a * inv_phi(f))
}

/// Population standard deviation of the one-step differences inside
/// the `window` most recent observations ending at `at_index`.
pub fn rolling_diff_sd(series: &TimeSeries, window: usize, at_index: usize) -> Result<f64> {
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
    let slice = &series.values()[at_index + 1 - window..=at_index];
    let m = (window - 1) as f64;
    let diffs: Vec<f64> = slice.windows(2).map(|w| w[1] - w[0]).collect();
    let mean = diffs.iter().sum::<f64>() / m;
    let var = diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / m;
    Ok(var.sqrt())
}

/// Persistence baseline: centers a Gaussian on the current value with
/// the rolling one-step-difference spread, then takes the cost-optimal
/// quantile. The result is floored at `1e-9` times the current value
/// to stay positive; [`predict_persistence_baseline_with_floor`] makes
/// the floor explicit.
pub fn predict_persistence_baseline(
    series: &TimeSeries,
    window: usize,
    at_index: usize,
    weights: &CostWeights,
) -> Result<Prediction> {
    if at_index >= series.len() {
        return Err(ForecastError::InvalidArgument(format!(
            "at_index {at_index} is out of range for a series of length {}",
            series.len()
        )));
    }
    let floor = 1e-9 * series.values()[at_index];
    predict_persistence_baseline_with_floor(series, window, at_index, weights, floor)
}

/// [`predict_persistence_baseline`] with a caller-chosen positive floor.
pub fn predict_persistence_baseline_with_floor(
    series: &TimeSeries,
    window: usize,
    at_index: usize,
    weights: &CostWeights,
    min_value: f64,
) -> Result<Prediction> {
    if !(min_value.is_finite() && min_value > 0.0) {
        return Err(ForecastError::InvalidArgument(format!(
            "min_value must be positive and finite, got {min_value}"
        )));
    }
    let sigma_a = rolling_diff_sd(series, window, at_index)?;
    let mu_a = series.values()[at_index];
    let f = fractile(weights)?;
    let raw = predict_gaussian_quantile(mu_a, sigma_a, weights)?;
    let floored = raw < min_value;
    let k_star = if floored { min_value } else { raw };
    Ok(Prediction {
        k_star,
        method: PredictionMethod::BaselineQuantile,
        expected_cost: gaussian_expected_cost(k_star, mu_a, sigma_a, weights),
        fractile: f,
        floored,
    })
}

/// Expected penalty of announcing `k` against `N(mu, sigma^2)`, in
/// units of `p_over`; the Gaussian analogue of [`expected_cost`].
fn gaussian_expected_cost(k: f64, mu: f64, sigma: f64, weights: &CostWeights) -> f64 {
    let omega = weights.omega();
    let upside = if sigma > 0.0 {
        let z = (k - mu) / sigma;
        sigma * (norm_pdf(z) - z * (1.0 - phi(z)))
    } else {
        (mu - k).max(0.0)
    };
    (weights.p_over() * ((1.0 + omega) * upside + (k - mu))).max(0.0)
}

fn validate_spot_dt(s: f64, dt: f64) -> Result<()> {
    if !(s.is_finite() && s > 0.0) {
        return Err(ForecastError::InvalidArgument(format!(
            "spot must be positive and finite, got {s}"
        )));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(ForecastError::InvalidArgument(format!(
            "dt must be positive and finite, got {dt}"
        )));
    }
    Ok(())
}

/// Van Wijngaarden-Dekker-Brent root bracketing; assumes `f(a)` and
/// `f(b)` straddle zero.
fn brent_root(
    f: impl Fn(f64) -> f64,
    a0: f64,
    b0: f64,
    rel_tol: f64,
    max_iter: usize,
) -> Result<f64> {
    let (mut a, mut b) = (a0, b0);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(ForecastError::Internal(format!(
            "lost the root bracket: f({a}) = {fa}, f({b}) = {fb}"
        )));
    }
    let (mut c, mut fc) = (a, fa);
    let (mut d, mut e) = (b - a, b - a);
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs()
            + 0.5 * rel_tol * b.abs().max(f64::MIN_POSITIVE);
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // Inverse quadratic interpolation, falling back to secant.
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let r0 = fa / fc;
                let r1 = fb / fc;
                p = s * (2.0 * xm * r0 * (r0 - r1) - (b - a) * (r1 - 1.0));
                q = (r0 - 1.0) * (r1 - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if d.abs() > tol1 {
            b += d;
        } else {
            b += tol1.copysign(xm);
        }
        fb = f(b);
    }
    Err(ForecastError::Internal(
        "root finder did not converge within the iteration limit".into(),
    ))
}
