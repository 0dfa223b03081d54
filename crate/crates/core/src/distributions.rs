//! Probability models with exact risk oracles.
//!
//! Everything the estimators are validated against is derived from three
//! truncated moments at a threshold `t`: `P(X > t)`, `E[X 1{X > t}]` and
//! `E[X^2 1{X > t}]`, plus the excess moments `E[(X - t)^+]` and
//! `E[((X - t)^+)^2]`. Parametric kinds have closed forms for all of them;
//! [`DistributionModel::tail_moments_by_quadrature`] recomputes them from
//! the density as an independent route.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal as StdNormal};
use statrs::function::erf::erfc;
use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};

use crate::error::{Error, Result};
use crate::estimator::AlphaLevel;
use crate::numeric::{bracketed_root, integrate_tail};

const QUANTILE_TOL: f64 = 1e-10;
const QUADRATURE_REL_TOL: f64 = 1e-11;

/// A samplable law with oracles for its quantile, superquantile and the
/// variances of the recursion noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistributionModel {
    Exponential { rate: f64 },
    Gamma { shape: f64, rate: f64 },
    Pareto { scale: f64, index: f64 },
    Normal { mean: f64, sd: f64 },
    /// Sorted sample; sampling draws from it with replacement.
    Empirical { points: Vec<f64> },
}

/// `P(X > t)`, `E[X 1{X > t}]`, `E[X^2 1{X > t}]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailMoments {
    pub prob: f64,
    pub first: f64,
    pub second: f64,
}

/// `E[(X - t)^+]` and `E[((X - t)^+)^2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcessMoments {
    pub first: f64,
    pub second: f64,
}

/// The two drift functions of the superquantile recursions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Drift {
    /// Mean target of the standard recursion, `E[X 1{X > t}] / (1 - alpha)`.
    pub h: f64,
    /// Mean target of the convexified recursion, `t + E[(X - t)^+] / (1 - alpha)`.
    pub l: f64,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidModel(format!("{name} = {v} must be positive and finite")))
    }
}

fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

fn std_normal_sf(z: f64) -> f64 {
    0.5 * erfc(z * FRAC_1_SQRT_2)
}

impl DistributionModel {
    pub fn exponential(rate: f64) -> Result<Self> {
        let m = Self::Exponential { rate };
        m.validate()?;
        Ok(m)
    }

    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        let m = Self::Gamma { shape, rate };
        m.validate()?;
        Ok(m)
    }

    pub fn pareto(scale: f64, index: f64) -> Result<Self> {
        let m = Self::Pareto { scale, index };
        m.validate()?;
        Ok(m)
    }

    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        let m = Self::Normal { mean, sd };
        m.validate()?;
        Ok(m)
    }

    pub fn empirical(mut points: Vec<f64>) -> Result<Self> {
        points.sort_by(f64::total_cmp);
        let m = Self::Empirical { points };
        m.validate()?;
        Ok(m)
    }

    /// Checks parameter ranges. Deserialized models must pass this before use.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Exponential { rate } => positive("rate", *rate),
            Self::Gamma { shape, rate } => {
                positive("shape", *shape)?;
                positive("rate", *rate)
            }
            Self::Pareto { scale, index } => {
                positive("scale", *scale)?;
                positive("index", *index)
            }
            Self::Normal { mean, sd } => {
                if !mean.is_finite() {
                    return Err(Error::InvalidModel(format!("mean = {mean} must be finite")));
                }
                positive("sd", *sd)
            }
            Self::Empirical { points } => {
                if points.is_empty() {
                    return Err(Error::InvalidModel("empirical model needs at least one point".into()));
                }
                if let Some(bad) = points.iter().find(|p| !p.is_finite()) {
                    return Err(Error::InvalidModel(format!("empirical point {bad} is not finite")));
                }
                if points.windows(2).any(|w| w[0] > w[1]) {
                    return Err(Error::InvalidModel("empirical points must be sorted".into()));
                }
                Ok(())
            }
        }
    }

    pub fn is_continuous(&self) -> bool {
        !matches!(self, Self::Empirical { .. })
    }

    /// Lower end of the support.
    pub fn support_lower(&self) -> f64 {
        match self {
            Self::Exponential { .. } | Self::Gamma { .. } => 0.0,
            Self::Pareto { scale, .. } => *scale,
            Self::Normal { .. } => f64::NEG_INFINITY,
            Self::Empirical { points } => points[0],
        }
    }

    /// A natural length scale, used to size quadrature panels and grids.
    pub fn scale_hint(&self) -> f64 {
        match self {
            Self::Exponential { rate } => 1.0 / rate,
            Self::Gamma { shape, rate } => shape.sqrt() / rate,
            Self::Pareto { scale, .. } => *scale,
            Self::Normal { sd, .. } => *sd,
            Self::Empirical { points } => {
                let span = points[points.len() - 1] - points[0];
                if span > 0.0 {
                    span
                } else {
                    1.0
                }
            }
        }
    }

    /// Fails unless `E|X|^order` is finite.
    pub fn check_moment(&self, order: u32) -> Result<()> {
        if let Self::Pareto { index, .. } = self {
            if *index <= order as f64 {
                let what = if order == 1 { "an integrable law" } else { "a finite second moment" };
                return Err(Error::NotIntegrable(format!(
                    "pareto index = {index} must exceed {order} for {what}"
                )));
            }
        }
        Ok(())
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Self::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            Self::Gamma { shape, rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    gamma_lr(*shape, rate * x)
                }
            }
            Self::Pareto { scale, index } => {
                if x <= *scale {
                    0.0
                } else {
                    1.0 - (scale / x).powf(*index)
                }
            }
            Self::Normal { mean, sd } => std_normal_sf(-(x - mean) / sd),
            Self::Empirical { points } => {
                points.partition_point(|p| *p <= x) as f64 / points.len() as f64
            }
        }
    }

    /// `P(X > x)`.
    pub fn sf(&self, x: f64) -> f64 {
        match self {
            Self::Exponential { rate } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-rate * x).exp()
                }
            }
            Self::Gamma { shape, rate } => {
                if x <= 0.0 {
                    1.0
                } else {
                    gamma_ur(*shape, rate * x)
                }
            }
            Self::Pareto { scale, index } => {
                if x <= *scale {
                    1.0
                } else {
                    (scale / x).powf(*index)
                }
            }
            Self::Normal { mean, sd } => std_normal_sf((x - mean) / sd),
            Self::Empirical { .. } => 1.0 - self.cdf(x),
        }
    }

    /// Density; `None` for the empirical kind.
    pub fn pdf(&self, x: f64) -> Option<f64> {
        Some(match self {
            Self::Exponential { rate } => {
                if x < 0.0 {
                    0.0
                } else {
                    rate * (-rate * x).exp()
                }
            }
            Self::Gamma { shape, rate } => {
                if x <= 0.0 {
                    if x == 0.0 && *shape == 1.0 {
                        *rate
                    } else {
                        0.0
                    }
                } else {
                    (shape * rate.ln() + (shape - 1.0) * x.ln() - rate * x - ln_gamma(*shape)).exp()
                }
            }
            Self::Pareto { scale, index } => {
                if x < *scale {
                    0.0
                } else {
                    index * scale.powf(*index) / x.powf(index + 1.0)
                }
            }
            Self::Normal { mean, sd } => std_normal_pdf((x - mean) / sd) / sd,
            Self::Empirical { .. } => return None,
        })
    }

    /// Derivative of the density; `None` for the empirical kind.
    pub fn pdf_derivative(&self, x: f64) -> Option<f64> {
        let f = self.pdf(x)?;
        Some(match self {
            Self::Exponential { rate } => {
                if x < 0.0 {
                    0.0
                } else {
                    -rate * f
                }
            }
            Self::Gamma { shape, rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    f * ((shape - 1.0) / x - rate)
                }
            }
            Self::Pareto { scale, index } => {
                if x < *scale {
                    0.0
                } else {
                    -(index + 1.0) / x * f
                }
            }
            Self::Normal { mean, sd } => -(x - mean) / (sd * sd) * f,
            Self::Empirical { .. } => unreachable!(),
        })
    }

    /// The level-`alpha` quantile. Empirical models use the left-continuous
    /// inverse `min { x : F(x) >= alpha }`.
    pub fn quantile(&self, alpha: AlphaLevel) -> Result<f64> {
        let a = alpha.value();
        match self {
            Self::Exponential { rate } => Ok(-(-a).ln_1p() / rate),
            Self::Pareto { scale, index } => Ok(scale * (1.0 - a).powf(-1.0 / index)),
            Self::Normal { mean, sd } => {
                let mut z = StdNormal::standard().inverse_cdf(a);
                // One Newton step on Phi(z) = alpha.
                let phi = std_normal_pdf(z);
                if phi > 0.0 {
                    let resid = if a < 0.5 {
                        std_normal_sf(-z) - a
                    } else {
                        (1.0 - a) - std_normal_sf(z)
                    };
                    z -= resid / phi;
                }
                Ok(mean + sd * z)
            }
            Self::Gamma { shape, rate } => {
                let mean = shape / rate;
                let sd = shape.sqrt() / rate;
                let g = |x: f64| {
                    if x <= 0.0 {
                        -a
                    } else if a > 0.5 {
                        (1.0 - a) - gamma_ur(*shape, rate * x)
                    } else {
                        self.cdf(x) - a
                    }
                };
                let hi = mean + 10.0 * sd;
                let root = bracketed_root(g, 0.0, hi, QUANTILE_TOL * sd.min(1.0))?;
                Ok(root)
            }
            Self::Empirical { points } => {
                let n = points.len();
                let t = a * n as f64;
                let mut k = t.ceil();
                if k - t > 1.0 - 1e-9 {
                    k -= 1.0;
                }
                let k = (k as usize).clamp(1, n);
                Ok(points[k - 1])
            }
        }
    }

    /// Truncated moments above `t`, from closed forms.
    pub fn tail_moments(&self, t: f64) -> Result<TailMoments> {
        Ok(match self {
            Self::Exponential { rate } => {
                let l = *rate;
                if t <= 0.0 {
                    TailMoments { prob: 1.0, first: 1.0 / l, second: 2.0 / (l * l) }
                } else {
                    let s = (-l * t).exp();
                    TailMoments {
                        prob: s,
                        first: s * (t + 1.0 / l),
                        second: s * (t * t + 2.0 * t / l + 2.0 / (l * l)),
                    }
                }
            }
            Self::Gamma { shape, rate } => {
                let (k, b) = (*shape, *rate);
                let x = (b * t).max(0.0);
                let q = |s: f64| if x == 0.0 { 1.0 } else { gamma_ur(s, x) };
                TailMoments {
                    prob: q(k),
                    first: k / b * q(k + 1.0),
                    second: k * (k + 1.0) / (b * b) * q(k + 2.0),
                }
            }
            Self::Pareto { scale, index } => {
                let (xm, a) = (*scale, *index);
                let t = t.max(xm);
                let partial = |j: f64| -> Result<f64> {
                    if a <= j {
                        self.check_moment(j as u32)?;
                    }
                    Ok(a * xm.powf(a) * t.powf(j - a) / (a - j))
                };
                TailMoments {
                    prob: (xm / t).powf(a),
                    first: partial(1.0)?,
                    second: partial(2.0)?,
                }
            }
            Self::Normal { mean, sd } => {
                let z = (t - mean) / sd;
                let s = std_normal_sf(z);
                let phi = std_normal_pdf(z);
                TailMoments {
                    prob: s,
                    first: mean * s + sd * phi,
                    second: (mean * mean + sd * sd) * s + sd * phi * (mean + t),
                }
            }
            Self::Empirical { points } => {
                let n = points.len() as f64;
                let above = &points[points.partition_point(|p| *p <= t)..];
                TailMoments {
                    prob: above.len() as f64 / n,
                    first: above.iter().sum::<f64>() / n,
                    second: above.iter().map(|x| x * x).sum::<f64>() / n,
                }
            }
        })
    }

    /// Excess moments above `t`, from closed forms.
    pub fn excess_moments(&self, t: f64) -> Result<ExcessMoments> {
        Ok(match self {
            Self::Exponential { rate } => {
                let l = *rate;
                if t >= 0.0 {
                    let s = (-l * t).exp();
                    ExcessMoments { first: s / l, second: 2.0 * s / (l * l) }
                } else {
                    ExcessMoments {
                        first: 1.0 / l - t,
                        second: 2.0 / (l * l) - 2.0 * t / l + t * t,
                    }
                }
            }
            Self::Normal { mean, sd } => {
                let z = (t - mean) / sd;
                let s = std_normal_sf(z);
                let phi = std_normal_pdf(z);
                ExcessMoments {
                    first: sd * (phi - z * s),
                    second: sd * sd * ((1.0 + z * z) * s - z * phi),
                }
            }
            Self::Empirical { points } => {
                let n = points.len() as f64;
                let above = &points[points.partition_point(|p| *p <= t)..];
                ExcessMoments {
                    first: above.iter().map(|x| x - t).sum::<f64>() / n,
                    second: above.iter().map(|x| (x - t) * (x - t)).sum::<f64>() / n,
                }
            }
            Self::Gamma { .. } | Self::Pareto { .. } => {
                let m = self.tail_moments(t)?;
                ExcessMoments {
                    first: m.first - t * m.prob,
                    second: m.second - 2.0 * t * m.first + t * t * m.prob,
                }
            }
        })
    }

    /// Truncated moments recomputed by adaptive quadrature of the density.
    pub fn tail_moments_by_quadrature(&self, t: f64) -> Result<TailMoments> {
        if !self.is_continuous() {
            return Err(Error::InvalidModel("quadrature needs a density".into()));
        }
        let lo = t.max(self.support_lower());
        let scale = self.scale_hint();
        let f = |x: f64| self.pdf(x).unwrap_or(0.0);
        let prob = integrate_tail(f, lo, scale, QUADRATURE_REL_TOL)?;
        let first = integrate_tail(|x| x * f(x), lo, scale, QUADRATURE_REL_TOL)?;
        self.check_moment(2)?;
        let second = integrate_tail(|x| x * x * f(x), lo, scale, QUADRATURE_REL_TOL)?;
        Ok(TailMoments { prob, first, second })
    }

    /// Superquantile `theta_alpha + E[(X - theta_alpha)^+] / (1 - alpha)`,
    /// which equals `E[X | X >= theta_alpha]` for continuous laws.
    pub fn superquantile(&self, alpha: AlphaLevel) -> Result<f64> {
        self.check_moment(1)?;
        let theta = self.quantile(alpha)?;
        Ok(self.drift(alpha, theta)?.l)
    }

    pub fn drift(&self, alpha: AlphaLevel, theta: f64) -> Result<Drift> {
        self.check_moment(1)?;
        let tail = alpha.tail();
        let first = match self {
            // H and L only need a first moment.
            Self::Pareto { scale, index } => {
                let t = theta.max(*scale);
                index * scale.powf(*index) * t.powf(1.0 - index) / (index - 1.0)
            }
            _ => self.tail_moments(theta)?.first,
        };
        let excess = match self {
            Self::Pareto { scale, index } => {
                let t = theta.max(*scale);
                // Below the scale P(X > t) = 1 and this is E[X] - theta.
                first - theta * (scale / t).powf(*index)
            }
            _ => self.excess_moments(theta)?.first,
        };
        Ok(Drift { h: first / tail, l: theta + excess / tail })
    }

    /// `(sigma^2, tau^2)` at the level-`alpha` quantile.
    pub fn variance_oracles(&self, alpha: AlphaLevel) -> Result<(f64, f64)> {
        self.check_moment(2)?;
        let theta = self.quantile(alpha)?;
        self.variances_at(alpha, theta)
    }

    /// `(sigma^2(t), tau^2(t))` at an arbitrary threshold.
    pub fn variances_at(&self, alpha: AlphaLevel, t: f64) -> Result<(f64, f64)> {
        self.check_moment(2)?;
        let tail2 = alpha.tail() * alpha.tail();
        let m = self.tail_moments(t)?;
        let e = self.excess_moments(t)?;
        let sigma_sq = (m.second - m.first * m.first) / tail2;
        let tau_sq = (e.second - e.first * e.first) / tail2;
        if tau_sq <= 0.0 && sigma_sq <= 0.0 {
            return Err(Error::Degenerate(format!(
                "no mass above the level-{alpha} quantile; both noise variances vanish"
            )));
        }
        Ok((sigma_sq.max(0.0), tau_sq.max(0.0)))
    }

    pub fn sampler(&self) -> Result<Sampler> {
        self.validate()?;
        let invalid = |e: &dyn fmt::Display| Error::InvalidModel(e.to_string());
        Ok(match self {
            Self::Exponential { rate } => Sampler::Exponential(rand_distr::Exp::new(*rate).map_err(|e| invalid(&e))?),
            Self::Gamma { shape, rate } => {
                Sampler::Gamma(rand_distr::Gamma::new(*shape, 1.0 / rate).map_err(|e| invalid(&e))?)
            }
            Self::Pareto { scale, index } => {
                Sampler::Pareto(rand_distr::Pareto::new(*scale, *index).map_err(|e| invalid(&e))?)
            }
            Self::Normal { mean, sd } => Sampler::Normal(rand_distr::Normal::new(*mean, *sd).map_err(|e| invalid(&e))?),
            Self::Empirical { points } => Sampler::Empirical(points.clone()),
        })
    }

    /// `n` i.i.d. draws from a ChaCha8 stream seeded with `seed`.
    pub fn sample(&self, seed: u64, n: usize) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::InvalidConfig("sample size must be at least 1".into()));
        }
        let sampler = self.sampler()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok((0..n).map(|_| sampler.sample(&mut rng)).collect())
    }
}

impl fmt::Display for DistributionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Exponential { rate } => write!(f, "exp:{rate}"),
            Self::Gamma { shape, rate } => write!(f, "gamma:{shape},{rate}"),
            Self::Pareto { scale, index } => write!(f, "pareto:{scale},{index}"),
            Self::Normal { mean, sd } => write!(f, "normal:{mean},{sd}"),
            Self::Empirical { points } => write!(f, "empirical[{}]", points.len()),
        }
    }
}

impl FromStr for DistributionModel {
    type Err = Error;

    /// Parses `exp:RATE`, `gamma:SHAPE,RATE`, `pareto:SCALE,INDEX` or
    /// `normal:MEAN,SD`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, params) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidModel(format!("expected KIND:PARAMS, got {s:?}")))?;
        let params: Vec<f64> = params
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidModel(format!("bad number {p:?} in {s:?}")))
            })
            .collect::<Result<_>>()?;
        let want = |k: usize| -> Result<()> {
            if params.len() == k {
                Ok(())
            } else {
                Err(Error::InvalidModel(format!("{kind} takes {k} parameter(s), got {}", params.len())))
            }
        };
        match kind.trim().to_ascii_lowercase().as_str() {
            "exp" | "exponential" => {
                want(1)?;
                Self::exponential(params[0])
            }
            "gamma" => {
                want(2)?;
                Self::gamma(params[0], params[1])
            }
            "pareto" => {
                want(2)?;
                Self::pareto(params[0], params[1])
            }
            "normal" => {
                want(2)?;
                Self::normal(params[0], params[1])
            }
            other => Err(Error::InvalidModel(format!(
                "unknown model kind {other:?}; expected exp, gamma, pareto or normal"
            ))),
        }
    }
}

/// Prepared sampler for a [`DistributionModel`].
#[derive(Debug, Clone)]
pub enum Sampler {
    Exponential(rand_distr::Exp<f64>),
    Gamma(rand_distr::Gamma<f64>),
    Pareto(rand_distr::Pareto<f64>),
    Normal(rand_distr::Normal<f64>),
    Empirical(Vec<f64>),
}

impl Distribution<f64> for Sampler {
    #[inline]
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Sampler::Exponential(d) => d.sample(rng),
            Sampler::Gamma(d) => d.sample(rng),
            Sampler::Pareto(d) => d.sample(rng),
            Sampler::Normal(d) => d.sample(rng),
            Sampler::Empirical(points) => points[rng.random_range(0..points.len())],
        }
    }
}

/// Ground-truth risk quantities of a model at one level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskOracle {
    pub model: DistributionModel,
    pub alpha: AlphaLevel,
    pub theta_alpha: f64,
    pub sq_alpha: f64,
    pub sigma_sq: f64,
    pub tau_sq: f64,
}

impl RiskOracle {
    pub fn new(model: &DistributionModel, alpha: AlphaLevel) -> Result<Self> {
        model.validate()?;
        let theta_alpha = model.quantile(alpha)?;
        let sq_alpha = model.superquantile(alpha)?;
        let (sigma_sq, tau_sq) = model.variance_oracles(alpha)?;
        Ok(Self {
            model: model.clone(),
            alpha,
            theta_alpha,
            sq_alpha,
            sigma_sq,
            tau_sq,
        })
    }

    /// Density at the quantile; `None` for empirical models.
    pub fn density_at_quantile(&self) -> Option<f64> {
        self.model.pdf(self.theta_alpha)
    }

    /// `sigma^2 - (alpha theta / (1 - alpha)) (2 vartheta - theta)`, which
    /// equals `tau^2` whenever `P(X > theta_alpha) = 1 - alpha`.
    pub fn tau_sq_from_sigma_sq(&self) -> f64 {
        let a = self.alpha.value();
        self.sigma_sq - a * self.theta_alpha / (1.0 - a) * (2.0 * self.sq_alpha - self.theta_alpha)
    }
}
