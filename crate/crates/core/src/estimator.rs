//! Coupled quantile / superquantile recursions.
//!
//! A single [`EstimatorState`] carries the Robbins-Monro quantile iterate
//! together with two superquantile iterates that share it: the standard one,
//! which averages `X / (1 - alpha) * 1{X > theta}`, and the convexified one,
//! which averages `theta + (X - theta) / (1 - alpha) * 1{X > theta}`. The two
//! gains decay at different rates (`a_n = a1 / n^a`, `b_n = b1 / n^b`), which
//! is what decorrelates the two estimates in the limit.

use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Upper clamp applied to the superquantile gain so early updates stay
/// convex combinations.
pub const GAIN_CLAMP_EPS: f64 = 1e-12;

/// Probability level strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct AlphaLevel(f64);

impl AlphaLevel {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha < 1.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidAlpha(alpha))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// `1 - alpha`, the tail mass above the quantile.
    #[inline]
    pub fn tail(self) -> f64 {
        1.0 - self.0
    }
}

impl TryFrom<f64> for AlphaLevel {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<AlphaLevel> for f64 {
    fn from(a: AlphaLevel) -> f64 {
        a.0
    }
}

impl fmt::Display for AlphaLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Which theoretical results apply to a step schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Regime {
    /// `a < b = 1`.
    FastB,
    /// `1/2 < a < b < 1`.
    SlowB,
    /// Any other ordering. The recursion still runs.
    Unsupported,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::FastB => "FAST_B",
            Regime::SlowB => "SLOW_B",
            Regime::Unsupported => "UNSUPPORTED",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct RawSchedule {
    a1: f64,
    a_exp: f64,
    b1: f64,
    b_exp: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    harmonic_shifted: bool,
}

/// Power-law gains `a_n = a1 / n^a_exp` and `b_n = b1 / n^b_exp`.
///
/// The `harmonic_shifted` form replaces the superquantile gain by
/// `b_n = 1 / (n + 1)`, under which both superquantile iterates are plain
/// running means. It is reported as `b1 = 1, b_exp = 1` for theory purposes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSchedule", into = "RawSchedule")]
pub struct StepSchedule {
    a1: f64,
    a_exp: f64,
    b1: f64,
    b_exp: f64,
    harmonic_shifted: bool,
}

fn check_exponent(name: &str, e: f64) -> Result<()> {
    if e.is_finite() && e > 0.5 && e <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidSchedule(format!(
            "{name} = {e} is outside (1/2, 1]"
        )))
    }
}

fn check_scale(name: &str, s: f64) -> Result<()> {
    if s.is_finite() && s > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSchedule(format!("{name} = {s} must be positive")))
    }
}

impl StepSchedule {
    pub fn power(a1: f64, a_exp: f64, b1: f64, b_exp: f64) -> Result<Self> {
        check_scale("a1", a1)?;
        check_scale("b1", b1)?;
        check_exponent("a_exp", a_exp)?;
        check_exponent("b_exp", b_exp)?;
        Ok(Self {
            a1,
            a_exp,
            b1,
            b_exp,
            harmonic_shifted: false,
        })
    }

    /// Quantile gain `a1 / n^a_exp`, superquantile gain `1 / (n + 1)`.
    pub fn harmonic_shifted(a1: f64, a_exp: f64) -> Result<Self> {
        check_scale("a1", a1)?;
        check_exponent("a_exp", a_exp)?;
        Ok(Self {
            a1,
            a_exp,
            b1: 1.0,
            b_exp: 1.0,
            harmonic_shifted: true,
        })
    }

    /// The schedule used for the financial experiments and most presets:
    /// `a1 = 5, a = 2/3, b1 = 3/4, b = 1`.
    pub fn finance_default() -> Self {
        Self::power(5.0, 2.0 / 3.0, 0.75, 1.0).expect("valid constants")
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    pub fn a_exp(&self) -> f64 {
        self.a_exp
    }

    pub fn b1(&self) -> f64 {
        self.b1
    }

    pub fn b_exp(&self) -> f64 {
        self.b_exp
    }

    pub fn is_harmonic_shifted(&self) -> bool {
        self.harmonic_shifted
    }

    /// Same schedule with the quantile gain scale replaced.
    pub fn with_a1(mut self, a1: f64) -> Result<Self> {
        check_scale("a1", a1)?;
        self.a1 = a1;
        Ok(self)
    }

    pub fn regime(&self) -> Regime {
        if self.a_exp < self.b_exp && self.b_exp == 1.0 {
            Regime::FastB
        } else if self.a_exp < self.b_exp && self.b_exp < 1.0 {
            Regime::SlowB
        } else {
            Regime::Unsupported
        }
    }

    /// `a_n` at step `n >= 1`.
    #[inline]
    pub fn quantile_gain(&self, n: u64) -> f64 {
        let n = n as f64;
        if self.a_exp == 1.0 {
            self.a1 / n
        } else {
            self.a1 / n.powf(self.a_exp)
        }
    }

    /// `b_n` at step `n >= 1` before clamping.
    #[inline]
    pub fn raw_superquantile_gain(&self, n: u64) -> f64 {
        if self.harmonic_shifted {
            return 1.0 / (n as f64 + 1.0);
        }
        let n = n as f64;
        if self.b_exp == 1.0 {
            self.b1 / n
        } else {
            self.b1 / n.powf(self.b_exp)
        }
    }

    /// `b_n` clamped into `[0, 1 - GAIN_CLAMP_EPS]`.
    #[inline]
    pub fn superquantile_gain(&self, n: u64) -> f64 {
        self.raw_superquantile_gain(n).clamp(0.0, 1.0 - GAIN_CLAMP_EPS)
    }

    /// Variance factor of the studentized superquantile error:
    /// `b1^2 / (2 b1 - 1)` when `b = 1`, `b1 / 2` when `b < 1`.
    pub fn nu_sq(&self) -> Result<f64> {
        match self.regime() {
            Regime::FastB => {
                if self.b1 <= 0.5 {
                    return Err(Error::InvalidSchedule(format!(
                        "b1 = {} must exceed 1/2 when b_exp = 1",
                        self.b1
                    )));
                }
                Ok(self.b1 * self.b1 / (2.0 * self.b1 - 1.0))
            }
            Regime::SlowB => Ok(self.b1 / 2.0),
            r @ Regime::Unsupported => Err(Error::UnsupportedRegime(r)),
        }
    }
}

impl TryFrom<RawSchedule> for StepSchedule {
    type Error = Error;

    fn try_from(raw: RawSchedule) -> Result<Self> {
        if raw.harmonic_shifted {
            Self::harmonic_shifted(raw.a1, raw.a_exp)
        } else {
            Self::power(raw.a1, raw.a_exp, raw.b1, raw.b_exp)
        }
    }
}

impl From<StepSchedule> for RawSchedule {
    fn from(s: StepSchedule) -> Self {
        RawSchedule {
            a1: s.a1,
            a_exp: s.a_exp,
            b1: s.b1,
            b_exp: s.b_exp,
            harmonic_shifted: s.harmonic_shifted,
        }
    }
}

/// How the iterates are initialized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    Fixed { theta0: f64, sq0: f64 },
    /// Quantile and both superquantile iterates start at the first
    /// observation, which is consumed by the initialization.
    WarmStart,
}

impl Default for Init {
    fn default() -> Self {
        Init::Fixed {
            theta0: 0.0,
            sq0: 0.0,
        }
    }
}

/// The two superquantile recursions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Standard,
    Convex,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::Standard, Variant::Convex];
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Standard => "standard",
            Variant::Convex => "convex",
        })
    }
}

/// Asymptotic confidence interval for the superquantile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub lo: f64,
    pub hi: f64,
    /// Set when the online variance estimate is zero, so the interval has
    /// collapsed to a point.
    pub degenerate: bool,
}

impl ConfidenceInterval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Running state of one two-time-scale recursion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorState {
    n: u64,
    theta: f64,
    sq_standard: f64,
    sq_convex: f64,
    m1: f64,
    m2: f64,
    schedule: StepSchedule,
    alpha: AlphaLevel,
}

fn finite(what: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { what, value })
    }
}

impl EstimatorState {
    pub fn new(alpha: AlphaLevel, schedule: StepSchedule, theta0: f64, sq0: f64) -> Result<Self> {
        Ok(Self {
            n: 1,
            theta: finite("initial quantile", theta0)?,
            sq_standard: finite("initial superquantile", sq0)?,
            sq_convex: sq0,
            m1: 0.0,
            m2: 0.0,
            schedule,
            alpha,
        })
    }

    /// Starts every iterate at `first`.
    pub fn warm_start(alpha: AlphaLevel, schedule: StepSchedule, first: f64) -> Result<Self> {
        Self::new(alpha, schedule, first, first)
    }

    /// Builds a state from `init`, pulling the first observation from `xs`
    /// when warm-starting. Fails on an empty stream in that case.
    pub fn from_init<I>(alpha: AlphaLevel, schedule: StepSchedule, init: Init, xs: &mut I) -> Result<Self>
    where
        I: Iterator<Item = f64>,
    {
        match init {
            Init::Fixed { theta0, sq0 } => Self::new(alpha, schedule, theta0, sq0),
            Init::WarmStart => {
                let first = xs.next().ok_or_else(|| {
                    Error::InsufficientData("warm start needs at least one observation".into())
                })?;
                Self::warm_start(alpha, schedule, finite("observation", first)?)
            }
        }
    }

    /// Feeds one observation through both recursions.
    ///
    /// Every update uses the quantile iterate from before this observation.
    #[inline]
    pub fn ingest(&mut self, x: f64) -> Result<()> {
        finite("observation", x)?;
        let one_minus_alpha = self.alpha.tail();
        let theta = self.theta;
        let b = self.schedule.superquantile_gain(self.n);

        let exceed = x > theta;
        let (tail_raw, excess) = if exceed {
            (x / one_minus_alpha, (x - theta) / one_minus_alpha)
        } else {
            (0.0, 0.0)
        };

        self.sq_standard += b * (tail_raw - self.sq_standard);
        self.sq_convex += b * (theta + excess - self.sq_convex);

        let count = self.n as f64;
        self.m1 += (excess - self.m1) / count;
        self.m2 += (excess * excess - self.m2) / count;

        let indicator = if exceed { 0.0 } else { 1.0 };
        self.theta = theta - self.schedule.quantile_gain(self.n) * (indicator - self.alpha.value());
        self.n += 1;
        Ok(())
    }

    pub fn ingest_all<I: IntoIterator<Item = f64>>(&mut self, xs: I) -> Result<()> {
        xs.into_iter().try_for_each(|x| self.ingest(x))
    }

    /// Step counter; 1 before any observation.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Number of observations ingested so far.
    pub fn observations(&self) -> u64 {
        self.n - 1
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn sq_standard(&self) -> f64 {
        self.sq_standard
    }

    pub fn sq_convex(&self) -> f64 {
        self.sq_convex
    }

    pub fn superquantile(&self, variant: Variant) -> f64 {
        match variant {
            Variant::Standard => self.sq_standard,
            Variant::Convex => self.sq_convex,
        }
    }

    /// Running mean of the scaled threshold excesses.
    pub fn excess_mean(&self) -> f64 {
        self.m1
    }

    /// Running mean of the squared scaled threshold excesses.
    pub fn excess_second_moment(&self) -> f64 {
        self.m2
    }

    pub fn schedule(&self) -> &StepSchedule {
        &self.schedule
    }

    pub fn alpha(&self) -> AlphaLevel {
        self.alpha
    }

    /// Online estimate of the asymptotic variance of the convexified noise.
    pub fn tau_sq(&self) -> Result<f64> {
        if self.n < 2 {
            return Err(Error::InsufficientData(
                "variance estimate needs at least one observation".into(),
            ));
        }
        Ok((self.m2 - self.m1 * self.m1).max(0.0))
    }

    /// Asymptotic `level` confidence interval around the chosen
    /// superquantile iterate, studentized by [`Self::tau_sq`].
    pub fn confidence_interval(&self, level: f64, variant: Variant) -> Result<ConfidenceInterval> {
        if !(level > 0.0 && level < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "confidence level {level} is outside (0, 1)"
            )));
        }
        let nu_sq = self.schedule.nu_sq()?;
        if self.schedule.raw_superquantile_gain(self.n) >= 1.0 {
            return Err(Error::InsufficientData(format!(
                "superquantile gain is not below 1 at n = {}",
                self.n
            )));
        }
        let tau_sq = self.tau_sq()?;
        let z = standard_normal_quantile((1.0 + level) / 2.0);
        let scale = (self.n as f64).powf(self.schedule.b_exp()).sqrt();
        let half = z * (nu_sq * tau_sq).sqrt() / scale;
        let center = self.superquantile(variant);
        Ok(ConfidenceInterval {
            lo: center - half,
            hi: center + half,
            degenerate: tau_sq == 0.0,
        })
    }
}

pub(crate) fn standard_normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha(a: f64) -> AlphaLevel {
        AlphaLevel::new(a).unwrap()
    }

    #[test]
    fn alpha_bounds() {
        assert!(AlphaLevel::new(0.0).is_err());
        assert!(AlphaLevel::new(1.0).is_err());
        assert!(AlphaLevel::new(f64::NAN).is_err());
        assert!(AlphaLevel::new(0.999).is_ok());
    }

    #[test]
    fn new_state_is_at_step_one() {
        let s = EstimatorState::new(alpha(0.5), StepSchedule::finance_default(), 0.0, 0.0).unwrap();
        assert_eq!(s.n(), 1);
        assert_eq!(s.theta(), 0.0);
        assert_eq!(s.sq_standard(), 0.0);
        assert_eq!(s.sq_convex(), 0.0);
        assert_eq!((s.excess_mean(), s.excess_second_moment()), (0.0, 0.0));

        let s = EstimatorState::new(alpha(0.9), StepSchedule::finance_default(), 1.5, 2.0).unwrap();
        assert_eq!(s.theta(), 1.5);
        assert_eq!(s.sq_standard(), 2.0);
        assert_eq!(s.sq_convex(), 2.0);
    }

    #[test]
    fn rejects_bad_exponent_and_nonfinite_init() {
        let err = StepSchedule::power(5.0, 0.4, 0.75, 1.0).unwrap_err();
        assert!(matches!(err, Error::InvalidSchedule(ref m) if m.contains("(1/2, 1]")));
        assert!(StepSchedule::power(5.0, 2.0 / 3.0, 0.75, 1.1).is_err());
        assert!(StepSchedule::power(0.0, 2.0 / 3.0, 0.75, 1.0).is_err());
        let sched = StepSchedule::finance_default();
        assert!(EstimatorState::new(alpha(0.5), sched, f64::NAN, 0.0).is_err());
        assert!(EstimatorState::new(alpha(0.5), sched, 0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn quantile_step_by_substitution() {
        let sched = StepSchedule::power(1.0, 1.0, 0.75, 1.0).unwrap();
        let mut s = EstimatorState::new(alpha(0.5), sched, 0.0, 0.0).unwrap();
        s.ingest(1.0).unwrap();
        assert_eq!(s.theta(), 0.5);
        assert_eq!(s.n(), 2);
    }

    #[test]
    fn superquantile_step_by_substitution() {
        let sched = StepSchedule::harmonic_shifted(1.0, 1.0).unwrap();
        let mut s = EstimatorState::new(alpha(0.5), sched, 0.0, 0.0).unwrap();
        s.ingest(2.0).unwrap();
        assert_eq!(s.sq_standard(), 2.0);
        // theta_1 = 0, so the convexified target equals the standard one here.
        assert_eq!(s.sq_convex(), 2.0);
    }

    #[test]
    fn nonfinite_observation_leaves_state_unchanged() {
        let mut s = EstimatorState::new(alpha(0.5), StepSchedule::finance_default(), 1.0, 2.0).unwrap();
        s.ingest(3.0).unwrap();
        let before = s.clone();
        assert!(s.ingest(f64::NAN).is_err());
        assert!(s.ingest(f64::NEG_INFINITY).is_err());
        assert_eq!(s, before);
    }

    #[test]
    fn tau_sq_edge_cases() {
        let s = EstimatorState::new(alpha(0.5), StepSchedule::finance_default(), 0.0, 0.0).unwrap();
        assert!(matches!(s.tau_sq(), Err(Error::InsufficientData(_))));

        // Nothing ever exceeds the threshold.
        let mut s = EstimatorState::new(alpha(0.5), StepSchedule::finance_default(), 100.0, 0.0).unwrap();
        s.ingest_all([1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.tau_sq().unwrap(), 0.0);

        // A negligible quantile gain keeps theta at zero for practical purposes.
        let sched = StepSchedule::power(1e-300, 1.0, 0.75, 1.0).unwrap();
        let mut s = EstimatorState::new(alpha(0.5), sched, 0.0, 0.0).unwrap();
        s.ingest_all([10.0, 10.0]).unwrap();
        assert_eq!(s.excess_mean(), 20.0);
        assert_eq!(s.excess_second_moment(), 400.0);
        assert_eq!(s.tau_sq().unwrap(), 0.0);
    }

    #[test]
    fn nu_sq_values() {
        let s = StepSchedule::power(5.0, 2.0 / 3.0, 0.75, 1.0).unwrap();
        assert!((s.nu_sq().unwrap() - 1.125).abs() < 1e-15);
        let s = StepSchedule::power(5.0, 0.6, 1.0, 0.8).unwrap();
        assert_eq!(s.nu_sq().unwrap(), 0.5);
        let s = StepSchedule::power(5.0, 0.8, 1.0, 0.6).unwrap();
        assert_eq!(s.regime(), Regime::Unsupported);
        assert_eq!(s.nu_sq(), Err(Error::UnsupportedRegime(Regime::Unsupported)));
        let s = StepSchedule::power(5.0, 2.0 / 3.0, 0.5, 1.0).unwrap();
        assert!(s.nu_sq().is_err());
    }

    #[test]
    fn regimes() {
        assert_eq!(StepSchedule::finance_default().regime(), Regime::FastB);
        assert_eq!(StepSchedule::power(1.0, 0.6, 1.0, 0.8).unwrap().regime(), Regime::SlowB);
        assert_eq!(StepSchedule::power(1.0, 1.0, 1.0, 1.0).unwrap().regime(), Regime::Unsupported);
        assert_eq!(StepSchedule::harmonic_shifted(1.0, 0.7).unwrap().regime(), Regime::FastB);
        assert_eq!(Regime::Unsupported.to_string(), "UNSUPPORTED");
    }

    #[test]
    fn gain_clamp() {
        let s = StepSchedule::power(1.0, 1.0, 3.0, 1.0).unwrap();
        assert_eq!(s.superquantile_gain(1), 1.0 - GAIN_CLAMP_EPS);
        assert_eq!(s.superquantile_gain(2), 1.0 - GAIN_CLAMP_EPS);
        assert_eq!(s.superquantile_gain(4), 0.75);
    }

    #[test]
    fn confidence_interval_errors() {
        let sched = StepSchedule::power(1.0, 0.8, 1.0, 0.6).unwrap();
        let mut s = EstimatorState::new(alpha(0.5), sched, 0.0, 0.0).unwrap();
        s.ingest_all([1.0, 2.0, 3.0]).unwrap();
        let err = s.confidence_interval(0.95, Variant::Convex).unwrap_err();
        assert!(err.to_string().contains("UNSUPPORTED"));

        let mut s = EstimatorState::new(alpha(0.5), StepSchedule::finance_default(), 100.0, 0.0).unwrap();
        s.ingest_all([1.0, 2.0]).unwrap();
        let ci = s.confidence_interval(0.95, Variant::Convex).unwrap();
        assert!(ci.degenerate);
        assert_eq!(ci.lo, ci.hi);
        assert!(s.confidence_interval(1.0, Variant::Convex).is_err());
    }

    #[test]
    fn confidence_interval_width() {
        let sched = StepSchedule::finance_default();
        let mut s = EstimatorState::new(alpha(0.5), sched, 0.0, 0.0).unwrap();
        s.ingest_all([1.0, 4.0, 2.0, 8.0, 5.0]).unwrap();
        let ci = s.confidence_interval(0.95, Variant::Convex).unwrap();
        let expected_half = 1.959963984540054 * (1.125 * s.tau_sq().unwrap()).sqrt() / (s.n() as f64).sqrt();
        assert!((ci.width() / 2.0 - expected_half).abs() < 1e-9 * expected_half);
        assert!(ci.contains(s.sq_convex()));
    }

    #[test]
    fn schedule_serde_validates() {
        let s: StepSchedule =
            serde_json::from_str(r#"{"a1":5.0,"a_exp":0.6,"b1":1.0,"b_exp":0.8}"#).unwrap();
        assert_eq!(s.regime(), Regime::SlowB);
        assert!(serde_json::from_str::<StepSchedule>(r#"{"a1":5.0,"a_exp":0.3,"b1":1.0,"b_exp":0.8}"#).is_err());
        assert!(serde_json::from_str::<AlphaLevel>("1.5").is_err());
        let h = StepSchedule::harmonic_shifted(2.0, 0.75).unwrap();
        let back: StepSchedule = serde_json::from_str(&serde_json::to_string(&h).unwrap()).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn warm_start_consumes_first() {
        let mut xs = [3.0, 4.0].into_iter();
        let s = EstimatorState::from_init(alpha(0.5), StepSchedule::finance_default(), Init::WarmStart, &mut xs).unwrap();
        assert_eq!((s.theta(), s.sq_standard(), s.sq_convex(), s.n()), (3.0, 3.0, 3.0, 1));
        assert_eq!(xs.next(), Some(4.0));
        let mut empty = std::iter::empty();
        assert!(EstimatorState::from_init(alpha(0.5), StepSchedule::finance_default(), Init::WarmStart, &mut empty).is_err());
    }
}
