//! Streaming negative CVaR of a return series.

use serde::{Deserialize, Serialize};
use sqstream::{AlphaLevel, EstimatorState, Init, StepSchedule, Variant};

use crate::error::{CliError, Result};
use crate::returns::ReturnSeries;

/// Losses are negated log-returns, so the level-`alpha` superquantile of the
/// losses is the negative CVaR of the returns at level `1 - alpha`.
pub const LOSS_CONVENTION: &str = "loss = -log_return; superquantile of losses at alpha = -CVaR of returns at 1 - alpha";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvarPoint {
    /// Observations consumed so far.
    pub n: u64,
    pub theta: f64,
    pub sq: f64,
    /// Studentized interval around `sq`, once one is defined.
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
}

/// Runs the convexified estimator over the losses of `series` and records the
/// state after every update.
///
/// With `Init::WarmStart` the first loss only seeds the iterates and no point
/// is emitted for it.
pub fn run_negative_cvar(
    series: &ReturnSeries,
    alpha: AlphaLevel,
    schedule: StepSchedule,
    level: f64,
    init: Init,
) -> Result<Vec<CvarPoint>> {
    if series.is_empty() {
        return Err(CliError::Invalid("return series is empty".into()));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(CliError::Invalid(format!("confidence level {level} is outside (0, 1)")));
    }
    let mut losses = series.losses();
    let mut state = EstimatorState::from_init(alpha, schedule, init, &mut losses)?;
    let mut out = Vec::with_capacity(series.len());
    for x in losses {
        state.ingest(x)?;
        // No interval before two observations or while the gain is too large.
        let ci = if state.observations() >= 2 { state.confidence_interval(level, Variant::Convex).ok() } else { None };
        out.push(CvarPoint {
            n: state.observations(),
            theta: state.theta(),
            sq: state.sq_convex(),
            ci_lo: ci.map(|c| c.lo),
            ci_hi: ci.map(|c| c.hi),
        });
    }
    Ok(out)
}
