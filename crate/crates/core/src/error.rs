//! Error type shared by every module in the crate.

use thiserror::Error;

/// Errors produced by series construction, estimation, pricing,
/// prediction and backtesting.
#[derive(Debug, Error)]
pub enum ForecastError {
    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Not enough observations to satisfy the request.
    #[error("insufficient data: needed {needed}, available {available}")]
    InsufficientData { needed: usize, available: usize },

    /// `sigma * sqrt(dt)` fell below the degeneracy threshold, so the
    /// lognormal quantities are undefined. Callers that can do so fall
    /// back to the deterministic (zero-volatility) formulas.
    #[error("degenerate volatility: sigma*sqrt(dt) = {sigma_sqrt_dt:e} is below {threshold:e}")]
    DegenerateVolatility { sigma_sqrt_dt: f64, threshold: f64 },

    /// A run configuration was inconsistent or infeasible for the data.
    #[error("configuration error: {0}")]
    Configuration(String),

    /// A numerical routine failed in a way that indicates a bug or a
    /// pathological input rather than a user error.
    #[error("internal error: {0}")]
    Internal(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, ForecastError>;
