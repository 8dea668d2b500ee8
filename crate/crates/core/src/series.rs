//! Core time-series types and geometric Brownian motion simulation.
//!
//! A [`TimeSeries`] is a strictly positive sequence sampled on a uniform
//! grid with spacing `dt`. Under GBM the level follows
//! `dS = mu * S dt + sigma * S dW`, whose exact solution steps as
//!
//! ```text
//! S(t + dt) = S(t) * exp((mu - sigma^2 / 2) * dt + sigma * sqrt(dt) * Z)
//! ```
//!
//! with `Z ~ N(0, 1)`. [`simulate_gbm`] uses that lognormal step rather
//! than an Euler discretization, so sampled paths carry no discretization
//! bias at any step size and stay positive by construction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{ForecastError, Result};

/// Strictly positive observations on a uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    dt: f64,
    origin_index: usize,
}

impl TimeSeries {
    /// Builds a series from raw values, rejecting anything that is not
    /// finite and strictly positive. The origin index defaults to 0.
    pub fn new(values: Vec<f64>, dt: f64) -> Result<Self> {
        Self::with_origin(values, dt, 0)
    }

    /// Like [`TimeSeries::new`] but records the index of the first
    /// observation, for reports on series that are a suffix of a larger
    /// data set.
    pub fn with_origin(values: Vec<f64>, dt: f64, origin_index: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(ForecastError::InvalidArgument(format!(
                "dt must be positive and finite, got {dt}"
            )));
        }
        if values.is_empty() {
            return Err(ForecastError::InvalidArgument(
                "a series needs at least one observation".into(),
            ));
        }
        for (i, &v) in values.iter().enumerate() {
            if !(v.is_finite() && v > 0.0) {
                return Err(ForecastError::InvalidArgument(format!(
                    "value at index {} must be positive and finite, got {v}",
                    origin_index + i
                )));
            }
        }
        Ok(Self { values, dt, origin_index })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn origin_index(&self) -> usize {
        self.origin_index
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        // Construction rejects empty value vectors.
        false
    }

    /// Last observation; the series is never empty.
    pub fn last(&self) -> f64 {
        *self.values.last().expect("series is never empty")
    }
}

/// GBM drift and volatility per unit time, together with the window
/// size used to estimate them (3 is the smallest window that yields a
/// variance from more than one return).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GbmParams {
    mu: f64,
    sigma: f64,
    window: usize,
}

impl GbmParams {
    pub fn new(mu: f64, sigma: f64, window: usize) -> Result<Self> {
        if !mu.is_finite() {
            return Err(ForecastError::InvalidArgument(format!(
                "mu must be finite, got {mu}"
            )));
        }
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(ForecastError::InvalidArgument(format!(
                "sigma must be nonnegative and finite, got {sigma}"
            )));
        }
        if window < 3 {
            return Err(ForecastError::InvalidArgument(format!(
                "window must be at least 3, got {window}"
            )));
        }
        Ok(Self { mu, sigma, window })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn window(&self) -> usize {
        self.window
    }
}

/// Per-unit penalties for overestimation (`p_over`) and underestimation
/// (`p_under`). Their ratio `omega = p_under / p_over` is what the
/// prediction rules actually consume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostWeights {
    p_over: f64,
    p_under: f64,
}

impl CostWeights {
    pub fn new(p_over: f64, p_under: f64) -> Result<Self> {
        for (name, v) in [("p_over", p_over), ("p_under", p_under)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(ForecastError::InvalidArgument(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self { p_over, p_under })
    }

    /// Weights with `p_over = 1` and the given cost ratio as `p_under`.
    pub fn from_omega(omega: f64) -> Result<Self> {
        Self::new(1.0, omega)
    }

    pub fn p_over(&self) -> f64 {
        self.p_over
    }

    pub fn p_under(&self) -> f64 {
        self.p_under
    }

    /// Cost ratio `p_under / p_over`.
    pub fn omega(&self) -> f64 {
        self.p_under / self.p_over
    }
}

impl Default for CostWeights {
    /// Symmetric costs: plain absolute error.
    fn default() -> Self {
        Self { p_over: 1.0, p_under: 1.0 }
    }
}

/// A Brownian increment over one grid step: `value ~ N(0, dt)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrownianIncrement {
    pub value: f64,
    pub dt: f64,
}

impl BrownianIncrement {
    /// Draws one increment from the given generator.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(ForecastError::InvalidArgument(format!(
                "dt must be positive and finite, got {dt}"
            )));
        }
        let z: f64 = rng.sample(StandardNormal);
        Ok(Self { value: dt.sqrt() * z, dt })
    }
}

/// Simulates `steps` exact lognormal GBM steps from `s0`, returning a
/// series of `steps + 1` values. The same seed always reproduces the
/// same path; `params.window()` plays no role here.
pub fn simulate_gbm(
    s0: f64,
    params: &GbmParams,
    steps: usize,
    dt: f64,
    seed: u64,
) -> Result<TimeSeries> {
    if !(s0.is_finite() && s0 > 0.0) {
        return Err(ForecastError::InvalidArgument(format!(
            "s0 must be positive and finite, got {s0}"
        )));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(ForecastError::InvalidArgument(format!(
            "dt must be positive and finite, got {dt}"
        )));
    }
    if steps == 0 {
        return Err(ForecastError::InvalidArgument(
            "steps must be at least 1".into(),
        ));
    }

    let drift = (params.mu() - 0.5 * params.sigma() * params.sigma()) * dt;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(steps + 1);
    values.push(s0);
    let mut current = s0;
    for _ in 0..steps {
        let w = BrownianIncrement::sample(&mut rng, dt)?;
        current *= (drift + params.sigma() * w.value).exp();
        values.push(current);
    }
    TimeSeries::new(values, dt)
}

/// Log returns `ln(S(i+1) / S(i))`; one fewer entry than the series.
pub fn log_returns(series: &TimeSeries) -> Result<Vec<f64>> {
    if series.len() < 2 {
        return Err(ForecastError::InsufficientData {
            needed: 2,
            available: series.len(),
        });
    }
    Ok(series
        .values()
        .windows(2)
        .map(|w| (w[1] / w[0]).ln())
        .collect())
}
