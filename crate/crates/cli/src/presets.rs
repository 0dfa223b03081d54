//! Named experiment configurations and the override layer on top of them.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sqstream::experiments::{log_spaced_checkpoints, run_replicas_with, Execution, ExperimentConfig, ExperimentReport, TrajectoryPoint};
use sqstream::{AlphaLevel, DistributionModel, StepSchedule, Variant};

use crate::error::{CliError, Result};
use crate::manifest::{RunManifest, RunSpec};
use crate::output::{create_dir, write_json, write_trajectory, Format};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Almost-sure convergence, exponential losses.
    ExpAs,
    /// Almost-sure convergence, gamma losses.
    GammaAs,
    CltFast,
    CltSlow,
    Qsl,
    Coverage,
}

impl Preset {
    pub const ALL: [Preset; 6] = [Preset::ExpAs, Preset::GammaAs, Preset::CltFast, Preset::CltSlow, Preset::Qsl, Preset::Coverage];

    pub fn name(self) -> &'static str {
        match self {
            Preset::ExpAs => "exp_as",
            Preset::GammaAs => "gamma_as",
            Preset::CltFast => "clt_fast",
            Preset::CltSlow => "clt_slow",
            Preset::Qsl => "qsl",
            Preset::Coverage => "coverage",
        }
    }

    pub fn names() -> Vec<&'static str> {
        Self::ALL.iter().map(|p| p.name()).collect()
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name).ok_or_else(|| CliError::UnknownPreset {
            name: name.to_string(),
            valid: Self::names(),
        })
    }

    pub fn config(self) -> ExperimentConfig {
        let exp = DistributionModel::exponential(0.1).expect("valid rate");
        let gamma = DistributionModel::gamma(4.0, 3.0).expect("valid parameters");
        let median = AlphaLevel::new(0.5).expect("valid level");
        // b_n = 1/n for the convergence figures.
        let harmonic = StepSchedule::power(5.0, 2.0 / 3.0, 1.0, 1.0).expect("valid schedule");
        let fast = StepSchedule::finance_default();
        let slow = StepSchedule::power(5.0, 0.6, 1.0, 0.8).expect("valid schedule");

        let mut cfg = match self {
            Preset::ExpAs => ExperimentConfig::new(exp, median, harmonic, 1_000_000, 1),
            Preset::GammaAs => ExperimentConfig::new(gamma, median, harmonic, 1_000_000, 1),
            Preset::CltFast => ExperimentConfig::new(exp, median, fast, 100_000, 2000),
            Preset::CltSlow => ExperimentConfig::new(exp, median, slow, 100_000, 2000),
            Preset::Qsl => ExperimentConfig::new(exp, median, fast, 1_000_000, 1),
            Preset::Coverage => ExperimentConfig::new(exp, median, fast, 100_000, 1000),
        };
        cfg.checkpoints = match self {
            Preset::ExpAs | Preset::GammaAs | Preset::Qsl => log_spaced_checkpoints(cfg.n_steps, 61),
            _ => log_spaced_checkpoints(cfg.n_steps, 11),
        };
        match self {
            Preset::Qsl => cfg.lil_window = Some((1_000, cfg.n_steps)),
            Preset::Coverage => cfg.ci_level = Some(0.95),
            _ => {}
        }
        cfg
    }
}

/// Field-by-field replacements for a configuration. Used both for command
/// line flags and for config files.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub alpha: Option<f64>,
    pub a1: Option<f64>,
    pub a_exp: Option<f64>,
    pub b1: Option<f64>,
    pub b_exp: Option<f64>,
    pub n: Option<u64>,
    pub replicas: Option<u64>,
    pub seed: Option<u64>,
    /// Model in `kind:params` form, e.g. `gamma:4,3`.
    pub model: Option<String>,
    pub level: Option<f64>,
}

impl Overrides {
    /// `self` where set, `fallback` elsewhere.
    pub fn or(self, fallback: Overrides) -> Overrides {
        Overrides {
            alpha: self.alpha.or(fallback.alpha),
            a1: self.a1.or(fallback.a1),
            a_exp: self.a_exp.or(fallback.a_exp),
            b1: self.b1.or(fallback.b1),
            b_exp: self.b_exp.or(fallback.b_exp),
            n: self.n.or(fallback.n),
            replicas: self.replicas.or(fallback.replicas),
            seed: self.seed.or(fallback.seed),
            model: self.model.or(fallback.model),
            level: self.level.or(fallback.level),
        }
    }

    pub fn schedule(&self, base: StepSchedule) -> Result<StepSchedule> {
        if self.a1.is_none() && self.a_exp.is_none() && self.b1.is_none() && self.b_exp.is_none() {
            return Ok(base);
        }
        if base.is_harmonic_shifted() && self.b1.is_none() && self.b_exp.is_none() {
            return Ok(StepSchedule::harmonic_shifted(
                self.a1.unwrap_or(base.a1()),
                self.a_exp.unwrap_or(base.a_exp()),
            )?);
        }
        Ok(StepSchedule::power(
            self.a1.unwrap_or(base.a1()),
            self.a_exp.unwrap_or(base.a_exp()),
            self.b1.unwrap_or(base.b1()),
            self.b_exp.unwrap_or(base.b_exp()),
        )?)
    }

    pub fn apply(&self, mut cfg: ExperimentConfig) -> Result<ExperimentConfig> {
        if let Some(a) = self.alpha {
            cfg.alpha = AlphaLevel::new(a)?;
        }
        cfg.schedule = self.schedule(cfg.schedule)?;
        if let Some(m) = &self.model {
            cfg.model = m.parse()?;
        }
        if let Some(n) = self.n {
            if !cfg.checkpoints.is_empty() {
                cfg.checkpoints = log_spaced_checkpoints(n, cfg.checkpoints.len());
            }
            cfg.lil_window = cfg.lil_window.and_then(|(lo, _)| (n >= 3).then(|| (lo.clamp(3, n), n)));
            cfg.n_steps = n;
        }
        if let Some(m) = self.replicas {
            cfg.n_replicas = m;
        }
        if let Some(s) = self.seed {
            cfg.base_seed = s;
        }
        if let Some(level) = self.level {
            cfg.ci_level = Some(level);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn execution(threads: Option<usize>) -> Result<Execution> {
    match threads {
        None => Ok(Execution::Parallel),
        Some(0) => Err(CliError::Invalid("--threads must be at least 1".into())),
        Some(threads) => Ok(Execution::ParallelWith { threads }),
    }
}

#[derive(Debug)]
pub struct ExperimentRun {
    pub report: ExperimentReport,
    pub manifest: RunManifest,
}

/// Runs `preset` with `overrides` applied and writes its outputs to `out_dir`.
pub fn run_preset(name: &str, overrides: &Overrides, out_dir: &Path, format: Format, threads: Option<usize>) -> Result<ExperimentRun> {
    let preset = Preset::from_name(name)?;
    let config = overrides.apply(preset.config())?;
    run_experiment(Some(preset.name()), config, out_dir, format, threads)
}

/// Runs a fully resolved configuration and writes `report.json`,
/// `manifest.json` and one trajectory file per tracked statistic.
pub fn run_experiment(
    preset: Option<&str>,
    config: ExperimentConfig,
    out_dir: &Path,
    format: Format,
    threads: Option<usize>,
) -> Result<ExperimentRun> {
    let report = run_replicas_with(&config, execution(threads)?)?;
    create_dir(out_dir)?;

    let mut outputs: Vec<PathBuf> = Vec::new();
    for (stem, points) in trajectories(&report) {
        if !points.is_empty() {
            outputs.push(write_trajectory(out_dir, &stem, &points, format)?);
        }
    }
    let report_path = out_dir.join("report.json");
    write_json(&report_path, &report)?;
    outputs.push(report_path);

    let manifest = RunManifest::new(
        RunSpec::Experiment {
            preset: preset.map(str::to_string),
            config,
            threads,
        },
        outputs,
    );
    manifest.write(&out_dir.join("manifest.json"))?;
    Ok(ExperimentRun { report, manifest })
}

/// Replica-mean iterates at each checkpoint, plus the QSL and LIL statistics.
pub fn trajectories(report: &ExperimentReport) -> Vec<(String, Vec<TrajectoryPoint>)> {
    let cfg = &report.config;
    let m = report.replicas.len() as f64;
    let mean_at = |i: usize, pick: &dyn Fn(&sqstream::experiments::Checkpoint) -> f64| {
        report.replicas.iter().map(|r| pick(&r.checkpoints[i])).sum::<f64>() / m
    };
    let iterate = |pick: &dyn Fn(&sqstream::experiments::Checkpoint) -> f64, truth: f64| -> Vec<TrajectoryPoint> {
        cfg.checkpoints
            .iter()
            .enumerate()
            .map(|(i, &n)| TrajectoryPoint { n, value: mean_at(i, pick), theory_value: Some(truth) })
            .collect()
    };

    let mut out = vec![("theta".to_string(), iterate(&|c| c.theta, report.theta_alpha))];
    for v in &report.variants {
        let tag = variant_tag(v.variant);
        out.push((format!("sq_{tag}"), iterate(&|c| c.sq(v.variant), report.sq_alpha)));
        out.push((format!("qsl_{tag}"), v.qsl_trajectory.clone()));
        out.push((format!("lil_{tag}"), v.lil_trajectory.clone()));
    }
    out
}

fn variant_tag(v: Variant) -> &'static str {
    match v {
        Variant::Standard => "standard",
        Variant::Convex => "convex",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_preset_lists_valid_names() {
        let e = Preset::from_name("foo").unwrap_err().to_string();
        for name in Preset::names() {
            assert!(e.contains(name), "{e}");
        }
    }

    #[test]
    fn presets_validate() {
        for p in Preset::ALL {
            p.config().validate().unwrap();
        }
    }

    #[test]
    fn cli_beats_file_beats_preset() {
        let file = Overrides { alpha: Some(0.9), n: Some(500), ..Default::default() };
        let cli = Overrides { alpha: Some(0.95), ..Default::default() };
        let cfg = cli.or(file).apply(Preset::Qsl.config()).unwrap();
        assert_eq!(cfg.alpha.value(), 0.95);
        assert_eq!(cfg.n_steps, 500);
        assert_eq!(cfg.lil_window, Some((500, 500)));
        assert_eq!(*cfg.checkpoints.last().unwrap(), 500);
        assert_eq!(cfg.schedule, StepSchedule::finance_default());
    }

    #[test]
    fn partial_schedule_override() {
        let o = Overrides { b_exp: Some(0.8), ..Default::default() };
        let s = o.schedule(StepSchedule::finance_default()).unwrap();
        assert_eq!((s.a1(), s.a_exp(), s.b1(), s.b_exp()), (5.0, 2.0 / 3.0, 0.75, 0.8));
    }
}
