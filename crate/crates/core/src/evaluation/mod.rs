//! Walk-forward evaluation: chronological splitting, window selection
//! on a validation segment, rolling one-step backtests and weighted
//! error metrics.
//!
//! The protocol is the usual three-way split. With boundary indices
//! `(n1, n2)` from [`SplitSpec::boundaries`], windows are selected by
//! scoring rolling predictions over the validation indices
//! `n1+1 ..= n2`, the winner is frozen, and the test indices
//! `n2+1 ..= len-1` produce the reported out-of-sample metrics. Rolling
//! windows are allowed to reach back across segment boundaries; only
//! the prediction targets are segregated.

mod backtest;
mod metrics;

pub use backtest::{
    evaluate_external, run_backtest, select_window, BacktestMethod, BacktestReport,
    ExternalForecast, WindowScore,
};
pub use metrics::{wmae, wmape, Side, StepRecord};

use serde::Serialize;

use crate::error::{ForecastError, Result};

const SPLIT_SUM_TOLERANCE: f64 = 1e-9;

/// Chronological train/validation/test fractions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SplitSpec {
    train_frac: f64,
    valid_frac: f64,
    test_frac: f64,
}

impl SplitSpec {
    pub fn new(train_frac: f64, valid_frac: f64, test_frac: f64) -> Result<Self> {
        for (name, f) in [
            ("train_frac", train_frac),
            ("valid_frac", valid_frac),
            ("test_frac", test_frac),
        ] {
            if !(f.is_finite() && f > 0.0 && f < 1.0) {
                return Err(ForecastError::Configuration(format!(
                    "{name} must lie strictly inside (0, 1), got {f}"
                )));
            }
        }
        let sum = train_frac + valid_frac + test_frac;
        if (sum - 1.0).abs() > SPLIT_SUM_TOLERANCE {
            return Err(ForecastError::Configuration(format!(
                "split fractions must sum to 1, got {sum}"
            )));
        }
        Ok(Self { train_frac, valid_frac, test_frac })
    }

    pub fn train_frac(&self) -> f64 {
        self.train_frac
    }

    pub fn valid_frac(&self) -> f64 {
        self.valid_frac
    }

    pub fn test_frac(&self) -> f64 {
        self.test_frac
    }

    /// Boundary indices `(n1, n2)`: training covers `0..=n1`,
    /// validation targets are `n1+1..=n2`, test targets are
    /// `n2+1..=len-1`. Boundary points belong to the earlier segment.
    pub fn boundaries(&self, len: usize) -> Result<(usize, usize)> {
        // The nudge keeps floor() faithful to the exact fractions when
        // len * frac lands within float noise of an integer.
        let n1 = (len as f64 * self.train_frac + 1e-9).floor() as usize;
        let n2 = (len as f64 * (self.train_frac + self.valid_frac) + 1e-9).floor() as usize;
        if n1 < 1 || n2 <= n1 || n2 + 1 > len.saturating_sub(1) {
            return Err(ForecastError::Configuration(format!(
                "series of length {len} splits into boundaries ({n1}, {n2}), which leaves \
                 an empty segment"
            )));
        }
        Ok((n1, n2))
    }
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self { train_frac: 0.5, valid_frac: 0.2, test_frac: 0.3 }
    }
}

/// Candidate window sizes for validation-based selection.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct WindowGrid {
    candidates: Vec<usize>,
}

impl WindowGrid {
    /// Sorted, deduplicated candidates; every entry must be at least 3.
    pub fn new(candidates: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut candidates: Vec<usize> = candidates.into_iter().collect();
        if candidates.is_empty() {
            return Err(ForecastError::Configuration(
                "window grid must contain at least one candidate".into(),
            ));
        }
        if let Some(&bad) = candidates.iter().find(|&&n| n < 3) {
            return Err(ForecastError::Configuration(format!(
                "window candidates must be at least 3, got {bad}"
            )));
        }
        candidates.sort_unstable();
        candidates.dedup();
        Ok(Self { candidates })
    }

    /// The default coarse grid 20, 40, ..., 1000.
    pub fn coarse() -> Self {
        Self { candidates: (1..=50).map(|i| i * 20).collect() }
    }

    /// The coarse grid restricted to candidates feasible at the first
    /// validation prediction; for series too short for even the
    /// smallest coarse candidate, falls back to every window from 3 up
    /// to the training length minus one.
    pub fn auto(series_len: usize, split: &SplitSpec) -> Result<Self> {
        let (n1, _) = split.boundaries(series_len)?;
        let limit = n1 + 1;
        let coarse: Vec<usize> = Self::coarse()
            .candidates
            .iter()
            .copied()
            .filter(|&n| n <= limit)
            .collect();
        if !coarse.is_empty() {
            return Ok(Self { candidates: coarse });
        }
        if n1 < 3 {
            return Err(ForecastError::Configuration(format!(
                "series of length {series_len} leaves a training segment too short \
                 for any window of at least 3"
            )));
        }
        Ok(Self { candidates: (3..=n1).collect() })
    }

    pub fn candidates(&self) -> &[usize] {
        &self.candidates
    }
}

impl Default for WindowGrid {
    fn default() -> Self {
        Self::coarse()
    }
}
