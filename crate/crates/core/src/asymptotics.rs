//! Theoretical limits: CLT variances, quadratic-strong-law and iterated
//! logarithm constants, and the growth of the gain product
//! `P_n = prod_k (1 - b_k)^-1`.

use serde::{Deserialize, Serialize};

use crate::distributions::{DistributionModel, RiskOracle};
use crate::error::{Error, Result};
use crate::estimator::{AlphaLevel, Regime, StepSchedule};
use crate::special::{gamma, ln_gamma, zeta, EULER_GAMMA};

/// Limits that the rescaled errors should reproduce for one model and
/// schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoreticalConstants {
    /// Variance of `sqrt(n^a) (theta_n - theta_alpha)`.
    pub gamma_theta: f64,
    /// Variance of `sqrt(n^b) (vartheta_n - vartheta_alpha)`.
    pub gamma_sq: f64,
    /// Variance of the studentized superquantile error.
    pub nu_sq: f64,
    /// Limit of the normalized running sum of squared superquantile errors.
    pub qsl_const: f64,
    /// Envelope of the iterated-logarithm rescaled superquantile error.
    pub lil_const: f64,
    pub qsl_theta: f64,
    pub lil_theta: f64,
    pub regime: Regime,
}

impl TheoreticalConstants {
    /// Constants from a risk oracle and the density at the quantile.
    pub fn from_oracle(oracle: &RiskOracle, schedule: &StepSchedule, f_at_theta: f64) -> Result<Self> {
        if !(f_at_theta > 0.0 && f_at_theta.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "density at the quantile must be positive, got {f_at_theta}"
            )));
        }
        let regime = schedule.regime();
        let nu_sq = schedule.nu_sq()?;
        let alpha = oracle.alpha.value();
        let tau_sq = oracle.tau_sq;
        let (a1, a, b1, b) = (schedule.a1(), schedule.a_exp(), schedule.b1(), schedule.b_exp());

        let gamma_theta = a1 * alpha * (1.0 - alpha) / (2.0 * f_at_theta);
        let gamma_sq = nu_sq * tau_sq;
        let qsl_const = match regime {
            Regime::FastB => b1 * b1 / (2.0 * b1 - 1.0) * tau_sq,
            _ => b1 / (2.0 * (1.0 - b)) * tau_sq,
        };
        let lil_const = gamma_sq.sqrt();
        let qsl_theta = gamma_theta / (1.0 - a);

        Ok(Self {
            gamma_theta,
            gamma_sq,
            nu_sq,
            qsl_const,
            lil_const,
            qsl_theta,
            lil_theta: gamma_theta.sqrt(),
            regime,
        })
    }

    /// Builds the oracle and reads the density from a parametric model.
    /// Empirical models are refused: they have no density to evaluate.
    pub fn for_model(model: &DistributionModel, alpha: AlphaLevel, schedule: &StepSchedule) -> Result<Self> {
        let oracle = RiskOracle::new(model, alpha)?;
        let f = oracle.density_at_quantile().ok_or_else(|| {
            Error::InvalidModel("theoretical constants need a parametric density".into())
        })?;
        Self::from_oracle(&oracle, schedule, f)
    }
}

/// `ln P_n` together with the first index of the product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainProduct {
    /// Factors start here; earlier indices have `b_k >= 1`.
    pub start: u64,
    pub n: u64,
    pub ln_value: f64,
}

impl GainProduct {
    pub fn value(&self) -> f64 {
        self.ln_value.exp()
    }
}

/// First index `k` with `b_k < 1`.
pub fn first_contracting_index(schedule: &StepSchedule) -> u64 {
    let mut k = if schedule.is_harmonic_shifted() {
        1
    } else {
        (schedule.b1().powf(1.0 / schedule.b_exp()).floor() as u64).max(1)
    };
    while k > 1 && schedule.raw_superquantile_gain(k - 1) < 1.0 {
        k -= 1;
    }
    while schedule.raw_superquantile_gain(k) >= 1.0 {
        k += 1;
    }
    k
}

/// `P_n = prod_{k = start}^{n} (1 - b_k)^-1`, accumulated in log space.
pub fn pn_product(schedule: &StepSchedule, n: u64) -> GainProduct {
    let start = first_contracting_index(schedule);
    let mut ln_value = 0.0;
    let mut k = n;
    // Smallest terms first.
    while k >= start {
        ln_value -= (-schedule.raw_superquantile_gain(k)).ln_1p();
        k -= 1;
    }
    GainProduct { start, n, ln_value }
}

/// Growth law of `P_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GainProductLimit {
    /// `P_n / n^exponent -> constant`.
    Polynomial { exponent: f64, constant: f64 },
    /// `ln P_n - rate * n^exponent -> log_offset`.
    Stretched { rate: f64, exponent: f64, log_offset: f64 },
}

impl GainProductLimit {
    /// The normalized quantity whose limit this describes, for a given
    /// product: `P_n / n^e` or `ln P_n - c n^e`.
    pub fn normalized(&self, p: &GainProduct) -> f64 {
        let n = p.n as f64;
        match *self {
            Self::Polynomial { exponent, .. } => (p.ln_value - exponent * n.ln()).exp(),
            Self::Stretched { rate, exponent, .. } => p.ln_value - rate * n.powf(exponent),
        }
    }

    pub fn target(&self) -> f64 {
        match *self {
            Self::Polynomial { constant, .. } => constant,
            Self::Stretched { log_offset, .. } => log_offset,
        }
    }
}

/// Asymptotic behaviour of [`pn_product`].
///
/// For `b = 1` the product grows like `n^b1` with constant
/// `Gamma(1 - {b1}) / Gamma(1 + floor(b1))`. For `b < 1` (and `b1 < 1`)
/// `ln P_n = b1 sum k^-b + Lambda_n`; expanding the partial zeta sum gives
/// `ln P_n - (b1 / (1 - b)) n^(1-b) -> Lambda + b1 zeta(b)`, with
/// `zeta(b)` the analytic continuation below 1.
pub fn pn_limit(schedule: &StepSchedule) -> Result<GainProductLimit> {
    if schedule.is_harmonic_shifted() {
        // prod (1 - 1/(k+1))^-1 = n + 1
        return Ok(GainProductLimit::Polynomial { exponent: 1.0, constant: 1.0 });
    }
    let (b1, b) = (schedule.b1(), schedule.b_exp());
    if b == 1.0 {
        let whole = b1.floor();
        let frac = b1 - whole;
        Ok(GainProductLimit::Polynomial {
            exponent: b1,
            constant: gamma(1.0 - frac) / gamma(1.0 + whole),
        })
    } else {
        if b1 >= 1.0 {
            return Err(Error::InvalidSchedule(format!(
                "the b < 1 product limit is only available for b1 < 1, got b1 = {b1}"
            )));
        }
        Ok(GainProductLimit::Stretched {
            rate: b1 / (1.0 - b),
            exponent: 1.0 - b,
            log_offset: zeta_series_lambda(b1, b) + b1 * zeta(b),
        })
    }
}

/// `Lambda = sum_{l >= 2} b1^l zeta(b l) / l`.
pub fn zeta_series_lambda(b1: f64, b: f64) -> f64 {
    let mut sum = 0.0;
    let mut power = b1;
    for l in 2..10_000u32 {
        power *= b1;
        let term = power * zeta(b * l as f64) / l as f64;
        sum += term;
        if term.abs() < 1e-15 * sum.abs() || term == 0.0 {
            break;
        }
    }
    sum
}

/// Both sides of Euler's series for the log-gamma function,
/// `ln Gamma(1 - x) = gamma x + sum_{n >= 2} x^n zeta(n) / n`.
/// Returns `(lhs, rhs)`; the left side comes from the Lanczos routine.
pub fn euler_gamma_check(b1: f64) -> Result<(f64, f64)> {
    if b1.is_nan() || b1.abs() >= 1.0 {
        return Err(Error::InvalidSchedule(format!("|b1| = {} must be below 1", b1.abs())));
    }
    let lhs = ln_gamma(1.0 - b1);
    let mut rhs = EULER_GAMMA * b1;
    let mut power = b1;
    for n in 2..100_000u32 {
        power *= b1;
        let term = power * zeta(n as f64) / n as f64;
        rhs += term;
        if term.abs() <= 1e-15 * rhs.abs() {
            break;
        }
    }
    Ok((lhs, rhs))
}
