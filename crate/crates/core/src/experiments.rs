//! Monte-Carlo harness for the estimator's limit laws.
//!
//! Each replica owns a ChaCha8 generator seeded with `base_seed` and set to
//! stream `replica`, so replicas are independent of one another and of the
//! order (or thread) they run on. Results are collected in replica order.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::TheoreticalConstants;
use crate::distributions::DistributionModel;
use crate::error::{Error, Result};
use crate::estimator::{AlphaLevel, EstimatorState, Init, StepSchedule, Variant};
use crate::stats::{correlation, SampleSummary};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: DistributionModel,
    pub alpha: AlphaLevel,
    pub schedule: StepSchedule,
    /// Observations fed to each replica (after warm start, if any).
    pub n_steps: u64,
    pub n_replicas: u64,
    pub base_seed: u64,
    #[serde(default = "all_variants")]
    pub variants: Vec<Variant>,
    /// Observation counts at which trajectories are snapshotted.
    #[serde(default)]
    pub checkpoints: Vec<u64>,
    #[serde(default)]
    pub init: Init,
    /// Level of the terminal confidence interval used for coverage.
    #[serde(default)]
    pub ci_level: Option<f64>,
    /// Inclusive range of observation counts over which the running maximum
    /// of the iterated-logarithm rescaled error is tracked.
    #[serde(default)]
    pub lil_window: Option<(u64, u64)>,
}

fn all_variants() -> Vec<Variant> {
    Variant::ALL.to_vec()
}

impl ExperimentConfig {
    pub fn new(model: DistributionModel, alpha: AlphaLevel, schedule: StepSchedule, n_steps: u64, n_replicas: u64) -> Self {
        Self {
            model,
            alpha,
            schedule,
            n_steps,
            n_replicas,
            base_seed: 0,
            variants: all_variants(),
            checkpoints: Vec::new(),
            init: Init::default(),
            ci_level: None,
            lil_window: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        self.model.validate()?;
        if self.n_steps < 1 {
            return bad("n_steps must be at least 1".into());
        }
        if self.n_replicas < 1 {
            return bad("n_replicas must be at least 1".into());
        }
        if self.variants.is_empty() {
            return bad("at least one variant is required".into());
        }
        if self.checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return bad("checkpoints must be strictly increasing".into());
        }
        if let (Some(&first), Some(&last)) = (self.checkpoints.first(), self.checkpoints.last()) {
            if first < 1 || last > self.n_steps {
                return bad(format!("checkpoints must lie in [1, {}]", self.n_steps));
            }
        }
        if let Some(level) = self.ci_level {
            if !(level > 0.0 && level < 1.0) {
                return bad(format!("ci_level {level} is outside (0, 1)"));
            }
        }
        if let Some((lo, hi)) = self.lil_window {
            if lo < 3 || lo > hi || hi > self.n_steps {
                return bad(format!("lil_window ({lo}, {hi}) must satisfy 3 <= lo <= hi <= n_steps"));
            }
        }
        Ok(())
    }

    fn tracks(&self, v: Variant) -> bool {
        self.variants.contains(&v)
    }
}

/// How replicas are scheduled. Results do not depend on the choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
    ParallelWith { threads: usize },
}

/// Normalizer of the quadratic strong law: `ln n` when `b = 1`,
/// `n^(1-b)` otherwise.
pub fn qsl_normalizer(schedule: &StepSchedule, n: u64) -> f64 {
    let n = n as f64;
    if schedule.b_exp() == 1.0 {
        n.ln()
    } else {
        n.powf(1.0 - schedule.b_exp())
    }
}

/// Multiplier of the superquantile error in the iterated-logarithm law:
/// `(n / (2 ln ln n))^(1/2)` when `b = 1`,
/// `(n^b / (2 (1-b) ln n))^(1/2)` otherwise.
pub fn lil_scale(schedule: &StepSchedule, n: u64) -> f64 {
    let b = schedule.b_exp();
    let nf = n as f64;
    if b == 1.0 {
        (nf / (2.0 * nf.ln().ln())).sqrt()
    } else {
        (nf.powf(b) / (2.0 * (1.0 - b) * nf.ln())).sqrt()
    }
}

/// Multiplier of the quantile error in the central limit theorem.
pub fn clt_scale_theta(schedule: &StepSchedule, n: u64) -> f64 {
    (n as f64).powf(schedule.a_exp()).sqrt()
}

/// Multiplier of the superquantile error in the central limit theorem.
pub fn clt_scale_sq(schedule: &StepSchedule, n: u64) -> f64 {
    (n as f64).powf(schedule.b_exp()).sqrt()
}

/// Normalized running sums of squared errors for a trajectory whose `k`-th
/// element (1-based) is the iterate after `k` observations. Emits one point
/// per `n >= 2`.
pub fn qsl_statistic(trajectory: &[f64], sq_alpha: f64, schedule: &StepSchedule) -> Vec<(u64, f64)> {
    let mut sum = 0.0;
    let mut out = Vec::with_capacity(trajectory.len().saturating_sub(1));
    for (i, v) in trajectory.iter().enumerate() {
        let e = v - sq_alpha;
        sum += e * e;
        let n = i as u64 + 1;
        if n >= 2 {
            out.push((n, sum / qsl_normalizer(schedule, n)));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LilPoint {
    pub n: u64,
    pub rescaled_error: f64,
    pub envelope: f64,
}

/// Iterated-logarithm rescaled errors for `n >= 3`, alongside the
/// theoretical envelope constant.
pub fn lil_envelope(trajectory: &[f64], sq_alpha: f64, schedule: &StepSchedule, envelope: f64) -> Vec<LilPoint> {
    trajectory
        .iter()
        .enumerate()
        .map(|(i, v)| (i as u64 + 1, v))
        .filter(|(n, _)| *n >= 3)
        .map(|(n, v)| LilPoint {
            n,
            rescaled_error: lil_scale(schedule, n) * (v - sq_alpha),
            envelope,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub n: u64,
    pub theta: f64,
    pub sq_standard: f64,
    pub sq_convex: f64,
    /// Normalized running sums of squared errors up to `n`; `None` where the
    /// normalizer vanishes (`n = 1` with `b = 1`).
    pub qsl_standard: Option<f64>,
    pub qsl_convex: Option<f64>,
}

/// Terminal state of one replica.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicaOutcome {
    pub replica: u64,
    pub theta: f64,
    pub sq_standard: f64,
    pub sq_convex: f64,
    pub tau_sq: f64,
    pub qsl_standard: Option<f64>,
    pub qsl_convex: Option<f64>,
    pub covered_standard: Option<bool>,
    pub covered_convex: Option<bool>,
    /// Largest `|lil_scale(n) (vartheta_n - vartheta_alpha)|` inside the
    /// configured window.
    pub lil_max_standard: Option<f64>,
    pub lil_max_convex: Option<f64>,
    pub checkpoints: Vec<Checkpoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub n: u64,
    pub value: f64,
    pub theory_value: Option<f64>,
}

/// Aggregated statistics for one superquantile recursion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantReport {
    pub variant: Variant,
    pub terminal_errors: Vec<f64>,
    /// `sqrt(n^b) (vartheta_n - vartheta_alpha)` per replica.
    pub rescaled: Vec<f64>,
    pub rescaled_summary: Option<SampleSummary>,
    /// Correlation between the rescaled quantile and superquantile errors.
    pub correlation_with_theta: Option<f64>,
    pub coverage: Option<f64>,
    /// Replica mean of the normalized squared-error sums at each checkpoint.
    pub qsl_trajectory: Vec<TrajectoryPoint>,
    /// Replica mean of the rescaled error at each checkpoint.
    pub lil_trajectory: Vec<TrajectoryPoint>,
    /// Fraction of replicas whose windowed LIL maximum stays below
    /// `1.5 * lil_const`.
    pub lil_within_envelope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub theta_alpha: f64,
    pub sq_alpha: f64,
    pub constants: Option<TheoreticalConstants>,
    /// Why `constants` is missing, if it is.
    pub constants_unavailable: Option<String>,
    pub theta_errors: Vec<f64>,
    /// `sqrt(n^a) (theta_n - theta_alpha)` per replica.
    pub rescaled_theta: Vec<f64>,
    pub rescaled_theta_summary: Option<SampleSummary>,
    pub variants: Vec<VariantReport>,
    pub replicas: Vec<ReplicaOutcome>,
    pub wall_clock_secs: f64,
}

/// Slack factor applied to the iterated-logarithm envelope when monitoring.
pub const LIL_SLACK: f64 = 1.5;

impl ExperimentReport {
    pub fn variant(&self, v: Variant) -> Option<&VariantReport> {
        self.variants.iter().find(|r| r.variant == v)
    }

    /// The report with its timing field zeroed; two runs of the same config
    /// serialize identically after this.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        r.wall_clock_secs = 0.0;
        r
    }
}

fn normalized(sum: f64, norm: f64) -> Option<f64> {
    (norm > 0.0).then(|| sum / norm)
}

struct ReplicaContext<'a> {
    config: &'a ExperimentConfig,
    sampler: crate::distributions::Sampler,
    sq_alpha: f64,
}

fn run_replica(ctx: &ReplicaContext<'_>, replica: u64) -> Result<ReplicaOutcome> {
    let cfg = ctx.config;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.base_seed);
    rng.set_stream(replica);
    let sampler = &ctx.sampler;

    let mut first = std::iter::from_fn(|| Some(sampler.sample(&mut rng)));
    let mut state = EstimatorState::from_init(cfg.alpha, cfg.schedule, cfg.init, &mut first)?;

    let sq_alpha = ctx.sq_alpha;
    let mut sum_std = 0.0;
    let mut sum_cvx = 0.0;
    let mut lil_std: Option<f64> = None;
    let mut lil_cvx: Option<f64> = None;
    let mut checkpoints = Vec::with_capacity(cfg.checkpoints.len());
    let mut next_checkpoint = cfg.checkpoints.iter().copied().peekable();
    let schedule = cfg.schedule;

    for n in 1..=cfg.n_steps {
        let x = sampler.sample(&mut rng);
        state.ingest(x)?;
        let e_std = state.sq_standard() - sq_alpha;
        let e_cvx = state.sq_convex() - sq_alpha;
        sum_std += e_std * e_std;
        sum_cvx += e_cvx * e_cvx;

        if let Some((lo, hi)) = cfg.lil_window {
            if n >= lo && n <= hi {
                let s = lil_scale(&schedule, n);
                let track = |slot: &mut Option<f64>, e: f64| {
                    let v = (s * e).abs();
                    *slot = Some(slot.map_or(v, |m| m.max(v)));
                };
                track(&mut lil_std, e_std);
                track(&mut lil_cvx, e_cvx);
            }
        }

        if next_checkpoint.peek() == Some(&n) {
            next_checkpoint.next();
            let norm = qsl_normalizer(&schedule, n);
            checkpoints.push(Checkpoint {
                n,
                theta: state.theta(),
                sq_standard: state.sq_standard(),
                sq_convex: state.sq_convex(),
                qsl_standard: normalized(sum_std, norm),
                qsl_convex: normalized(sum_cvx, norm),
            });
        }
    }

    let norm = qsl_normalizer(&schedule, cfg.n_steps);
    let (covered_standard, covered_convex) = match cfg.ci_level {
        Some(level) => {
            let cover = |v| state.confidence_interval(level, v).map(|ci| ci.contains(sq_alpha));
            (Some(cover(Variant::Standard)?), Some(cover(Variant::Convex)?))
        }
        None => (None, None),
    };

    Ok(ReplicaOutcome {
        replica,
        theta: state.theta(),
        sq_standard: state.sq_standard(),
        sq_convex: state.sq_convex(),
        tau_sq: state.tau_sq()?,
        qsl_standard: normalized(sum_std, norm),
        qsl_convex: normalized(sum_cvx, norm),
        covered_standard,
        covered_convex,
        lil_max_standard: lil_std,
        lil_max_convex: lil_cvx,
        checkpoints,
    })
}

/// Runs every replica and aggregates the result.
pub fn run_replicas(config: &ExperimentConfig) -> Result<ExperimentReport> {
    run_replicas_with(config, Execution::default())
}

pub fn run_replicas_with(config: &ExperimentConfig, execution: Execution) -> Result<ExperimentReport> {
    config.validate()?;
    let started = Instant::now();
    let theta_alpha = config.model.quantile(config.alpha)?;
    let sq_alpha = config.model.superquantile(config.alpha)?;
    let (constants, constants_unavailable) =
        match TheoreticalConstants::for_model(&config.model, config.alpha, &config.schedule) {
            Ok(c) => (Some(c), None),
            Err(e) => (None, Some(e.to_string())),
        };
    if config.ci_level.is_some() {
        config.schedule.nu_sq()?;
    }

    let ctx = ReplicaContext {
        config,
        sampler: config.model.sampler()?,
        sq_alpha,
    };
    let ids = 0..config.n_replicas;
    let replicas: Vec<ReplicaOutcome> = match execution {
        Execution::Sequential => ids.map(|i| run_replica(&ctx, i)).collect::<Result<_>>()?,
        Execution::Parallel => ids.into_par_iter().map(|i| run_replica(&ctx, i)).collect::<Result<_>>()?,
        Execution::ParallelWith { threads } => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
            pool.install(|| ids.into_par_iter().map(|i| run_replica(&ctx, i)).collect::<Result<_>>())?
        }
    };

    let n = config.n_steps;
    let theta_scale = clt_scale_theta(&config.schedule, n);
    let sq_scale = clt_scale_sq(&config.schedule, n);
    let theta_errors: Vec<f64> = replicas.iter().map(|r| r.theta - theta_alpha).collect();
    let rescaled_theta: Vec<f64> = theta_errors.iter().map(|e| theta_scale * e).collect();

    let m = replicas.len() as f64;
    let variants = config
        .variants
        .iter()
        .map(|&variant| {
            let pick = |r: &ReplicaOutcome| r.sq(variant);
            let terminal_errors: Vec<f64> = replicas.iter().map(|r| pick(r) - sq_alpha).collect();
            let rescaled: Vec<f64> = terminal_errors.iter().map(|e| sq_scale * e).collect();
            let coverage = config.ci_level.map(|_| {
                replicas.iter().filter(|r| r.covered(variant) == Some(true)).count() as f64 / m
            });
            let qsl_theory = constants.map(|c| c.qsl_const);
            let qsl_trajectory = config
                .checkpoints
                .iter()
                .enumerate()
                .filter_map(|(i, &cn)| {
                    let total = replicas.iter().map(|r| r.checkpoints[i].qsl(variant)).sum::<Option<f64>>()?;
                    Some(TrajectoryPoint { n: cn, value: total / m, theory_value: qsl_theory })
                })
                .collect();
            let lil_trajectory = config
                .checkpoints
                .iter()
                .enumerate()
                .filter(|(_, &cn)| cn >= 3)
                .map(|(i, &cn)| TrajectoryPoint {
                    n: cn,
                    value: replicas
                        .iter()
                        .map(|r| lil_scale(&config.schedule, cn) * (r.checkpoints[i].sq(variant) - sq_alpha))
                        .sum::<f64>()
                        / m,
                    theory_value: constants.map(|c| c.lil_const),
                })
                .collect();
            let lil_within_envelope = match (config.lil_window, constants) {
                (Some(_), Some(c)) => Some(
                    replicas
                        .iter()
                        .filter(|r| r.lil_max(variant).is_some_and(|v| v <= LIL_SLACK * c.lil_const))
                        .count() as f64
                        / m,
                ),
                _ => None,
            };
            VariantReport {
                variant,
                rescaled_summary: SampleSummary::of(&rescaled),
                correlation_with_theta: correlation(&rescaled_theta, &rescaled),
                terminal_errors,
                rescaled,
                coverage,
                qsl_trajectory,
                lil_trajectory,
                lil_within_envelope,
            }
        })
        .collect();

    Ok(ExperimentReport {
        config: config.clone(),
        theta_alpha,
        sq_alpha,
        constants,
        constants_unavailable,
        rescaled_theta_summary: SampleSummary::of(&rescaled_theta),
        theta_errors,
        rescaled_theta,
        variants,
        replicas,
        wall_clock_secs: started.elapsed().as_secs_f64(),
    })
}

/// Fraction of replicas whose terminal `level` interval for `variant`
/// contains the true superquantile.
pub fn coverage_experiment(config: &ExperimentConfig, level: f64, variant: Variant) -> Result<f64> {
    let mut cfg = config.clone();
    cfg.ci_level = Some(level);
    if !cfg.tracks(variant) {
        cfg.variants.push(variant);
    }
    let report = run_replicas(&cfg)?;
    Ok(report
        .variant(variant)
        .and_then(|v| v.coverage)
        .expect("coverage is computed when ci_level is set"))
}

impl ReplicaOutcome {
    pub fn sq(&self, v: Variant) -> f64 {
        match v {
            Variant::Standard => self.sq_standard,
            Variant::Convex => self.sq_convex,
        }
    }

    fn covered(&self, v: Variant) -> Option<bool> {
        match v {
            Variant::Standard => self.covered_standard,
            Variant::Convex => self.covered_convex,
        }
    }

    fn lil_max(&self, v: Variant) -> Option<f64> {
        match v {
            Variant::Standard => self.lil_max_standard,
            Variant::Convex => self.lil_max_convex,
        }
    }
}

impl Checkpoint {
    pub fn sq(&self, v: Variant) -> f64 {
        match v {
            Variant::Standard => self.sq_standard,
            Variant::Convex => self.sq_convex,
        }
    }

    pub fn qsl(&self, v: Variant) -> Option<f64> {
        match v {
            Variant::Standard => self.qsl_standard,
            Variant::Convex => self.qsl_convex,
        }
    }
}

/// `count` roughly log-spaced observation counts in `[1, n]`.
pub fn log_spaced_checkpoints(n: u64, count: usize) -> Vec<u64> {
    if n == 0 || count == 0 {
        return Vec::new();
    }
    let mut out: Vec<u64> = (0..count)
        .map(|i| {
            let t = if count == 1 { 1.0 } else { i as f64 / (count - 1) as f64 };
            ((n as f64).powf(t).round() as u64).clamp(1, n)
        })
        .collect();
    out.dedup();
    out
}
