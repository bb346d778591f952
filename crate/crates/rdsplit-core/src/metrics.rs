//! Time-aggregated error norms and convergence diagnostics for
//! refinement studies.
//!
//! A completed run yields a trace `e_0, …, e_N` of per-level spatial L²
//! error norms (one entry per time level, including t = 0). This module
//! collapses such a trace into three scalar summaries,
//!
//! * `linf_l2 = max_n e_n`,
//! * `l2_l2   = sqrt( k · Σ_n e_n² )`,
//! * `l1_l2   = k · Σ_n e_n`,
//!
//! and derives coarse-to-fine convergence ratios and observed orders from
//! summaries at successive spacings.

use core::fmt;

use crate::fmath;
use crate::grid::Grid;

/// Errors from trace summarization.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricsError {
    /// The trace is shorter than `n_steps + 1` levels or contains a
    /// non-finite entry: the run diverged (or was truncated) and has no
    /// meaningful aggregate.
    DivergedRun { expected_levels: usize, got: usize },
}

impl fmt::Display for MetricsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricsError::DivergedRun { expected_levels, got } => write!(
                f,
                "diverged run has no summary (expected {expected_levels} finite levels, got {got})"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for MetricsError {}

/// Three time-aggregated norms of a per-level error trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorSummary {
    /// Largest per-level error, `max_n e_n`.
    pub linf_l2: f64,
    /// Root of the time-weighted sum of squares, `sqrt(k·Σ e_n²)`.
    pub l2_l2: f64,
    /// Time-weighted sum, `k·Σ e_n`.
    pub l1_l2: f64,
}

/// Aggregates a complete error trace over all `n_steps + 1` time levels.
///
/// Summation runs in ascending level order so results are
/// bit-reproducible.
///
/// # Errors
///
/// [`MetricsError::DivergedRun`] when the trace has the wrong length or
/// any non-finite entry — both mean the run never completed cleanly.
pub fn summarize_errors(trace: &[f64], grid: &Grid) -> Result<ErrorSummary, MetricsError> {
    let expected_levels = grid.n_steps + 1;
    let diverged = MetricsError::DivergedRun {
        expected_levels,
        got: trace.len(),
    };
    if trace.len() != expected_levels || trace.iter().any(|e| !e.is_finite()) {
        return Err(diverged);
    }
    let mut worst = 0.0;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for &e in trace {
        if e > worst {
            worst = e;
        }
        sum += e;
        sum_sq += e * e;
    }
    Ok(ErrorSummary {
        linf_l2: worst,
        l2_l2: fmath::sqrt(grid.k * sum_sq),
        l1_l2: grid.k * sum,
    })
}

/// Error ratio between a coarse grid and the next finer one,
/// `coarse / fine`.
///
/// Returns `None` — rendered as an undefined marker in tables — when the
/// coarse error is non-finite or the fine error is not positive, which is
/// what diverged rows produce.
pub fn convergence_ratio(coarse: f64, fine: f64) -> Option<f64> {
    if !coarse.is_finite() || !(fine > 0.0) || !fine.is_finite() {
        return None;
    }
    Some(coarse / fine)
}

/// Observed convergence order for one spacing halving, `log₂(ratio)`.
///
/// `None` when the ratio is not a positive finite number.
pub fn observed_order(ratio: f64) -> Option<f64> {
    if !(ratio > 0.0) || !ratio.is_finite() {
        return None;
    }
    Some(fmath::log2(ratio))
}
