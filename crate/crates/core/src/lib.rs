//! Streaming estimation of quantiles (VaR) and superquantiles (CVaR) with
//! two-time-scale stochastic approximation.
//!
//! The [`estimator`] module holds the recursions themselves. [`distributions`]
//! supplies reference laws with exact oracles, [`asymptotics`] the limiting
//! constants, and [`experiments`] a Monte-Carlo harness that checks the
//! estimators against both.
//!
//! ```
//! use sqstream::{AlphaLevel, DistributionModel, EstimatorState, StepSchedule};
//!
//! let model = DistributionModel::exponential(0.1).unwrap();
//! let alpha = AlphaLevel::new(0.5).unwrap();
//! let mut est = EstimatorState::new(alpha, StepSchedule::finance_default(), 0.0, 0.0).unwrap();
//! est.ingest_all(model.sample(7, 200_000).unwrap()).unwrap();
//! assert!((est.theta() - 10.0 * 2f64.ln()).abs() < 0.5);
//! assert!((est.sq_convex() - model.superquantile(alpha).unwrap()).abs() < 1.0);
//! ```

pub mod asymptotics;
pub mod distributions;
pub mod error;
pub mod estimator;
pub mod experiments;
pub mod numeric;
pub mod special;
pub mod stats;

pub use asymptotics::{euler_gamma_check, pn_limit, pn_product, GainProductLimit, TheoreticalConstants};
pub use distributions::{DistributionModel, RiskOracle};
pub use error::{Error, Result};
pub use estimator::{AlphaLevel, ConfidenceInterval, EstimatorState, Init, Regime, StepSchedule, Variant};
pub use experiments::{run_replicas, run_replicas_with, ExperimentConfig, ExperimentReport, Execution};
