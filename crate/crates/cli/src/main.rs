use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sqstream::asymptotics::{pn_limit, pn_product};
use sqstream::{euler_gamma_check, AlphaLevel, DistributionModel, Init, RiskOracle, StepSchedule, TheoreticalConstants};
use sqstream_cli::output::{create_dir, fmt_f64, write_cvar_path};
use sqstream_cli::presets::execution;
use sqstream_cli::{
    ingest_csv, run_experiment, run_negative_cvar, Format, Overrides, Preset, RunManifest, RunSpec, Sampling, LOSS_CONVENTION,
};

#[derive(Parser)]
#[command(name = "sqstream", version, about = "Streaming quantile and superquantile (VaR/CVaR) estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Stream a price file's losses through the estimator.
    Estimate(EstimateArgs),
    /// Run a Monte-Carlo preset or config file.
    Experiment(ExperimentArgs),
    /// Print exact risk quantities and limit constants for a model.
    Oracle(OracleArgs),
    /// Compare the gain product with its asymptotic limit.
    PnCheck(PnCheckArgs),
}

#[derive(Args, Clone, Default)]
struct ScheduleArgs {
    /// Quantile gain constant.
    #[arg(long)]
    a1: Option<f64>,
    /// Quantile gain exponent.
    #[arg(long)]
    a_exp: Option<f64>,
    /// Superquantile gain constant.
    #[arg(long)]
    b1: Option<f64>,
    /// Superquantile gain exponent.
    #[arg(long)]
    b_exp: Option<f64>,
}

impl ScheduleArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            a1: self.a1,
            a_exp: self.a_exp,
            b1: self.b1,
            b_exp: self.b_exp,
            ..Default::default()
        }
    }

    fn resolve(&self) -> anyhow::Result<StepSchedule> {
        Ok(self.overrides().schedule(StepSchedule::finance_default())?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplingArg {
    EveryRow,
    /// Every fifth row.
    Weekly,
    /// Seven-day steps on the date column.
    WeeklyByDate,
}

impl From<SamplingArg> for Sampling {
    fn from(s: SamplingArg) -> Self {
        match s {
            SamplingArg::EveryRow => Sampling::EveryRow,
            SamplingArg::Weekly => Sampling::Weekly,
            SamplingArg::WeeklyByDate => Sampling::WeeklyByDate,
        }
    }
}

#[derive(Args)]
struct EstimateArgs {
    /// CSV file with a header row.
    #[arg(long)]
    input: PathBuf,
    /// Price column.
    #[arg(long)]
    column: String,
    #[arg(long, default_value_t = 0.9)]
    alpha: f64,
    #[command(flatten)]
    schedule: ScheduleArgs,
    /// Confidence level of the bands.
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    #[arg(long, value_enum, default_value = "every-row")]
    sampling: SamplingArg,
    /// Start all iterates at zero instead of at the first loss.
    #[arg(long)]
    no_warm_start: bool,
    #[arg(long, default_value = "sqstream-out")]
    out_dir: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct ExperimentArgs {
    /// One of exp_as, gamma_as, clt_fast, clt_slow, qsl, coverage.
    preset: Option<String>,
    /// JSON file of overrides (optionally naming a "preset"), or a manifest
    /// from an earlier run.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[command(flatten)]
    schedule: ScheduleArgs,
    /// Observations per replica.
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    replicas: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// exp:RATE, gamma:SHAPE,RATE, pareto:SCALE,INDEX or normal:MEAN,SD.
    #[arg(long)]
    model: Option<String>,
    /// Confidence level for coverage counting.
    #[arg(long)]
    level: Option<f64>,
    #[arg(long, default_value = "sqstream-out")]
    out_dir: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long, env = "SQ_STREAM_THREADS")]
    threads: Option<usize>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    model: String,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[command(flatten)]
    schedule: ScheduleArgs,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct PnCheckArgs {
    #[arg(long, default_value_t = 0.75)]
    b1: f64,
    #[arg(long, default_value_t = 1.0)]
    b_exp: f64,
    #[arg(long, default_value_t = 1_000_000)]
    n: u64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Estimate(args) => estimate(args),
        Command::Experiment(args) => experiment(args),
        Command::Oracle(args) => oracle(args),
        Command::PnCheck(args) => pn_check(args),
    }
}

fn estimate(args: EstimateArgs) -> anyhow::Result<()> {
    let sampling = Sampling::from(args.sampling);
    let series = ingest_csv(&args.input, &args.column, sampling).with_context(|| format!("reading {}", args.input.display()))?;
    let alpha = AlphaLevel::new(args.alpha)?;
    let schedule = args.schedule.resolve()?;
    let init = if args.no_warm_start { Init::default() } else { Init::WarmStart };
    let path = run_negative_cvar(&series, alpha, schedule, args.level, init)?;

    create_dir(&args.out_dir)?;
    let out = args.out_dir.join(format!("cvar.{}", args.format.extension()));
    write_cvar_path(&out, &path, args.format)?;
    let manifest = RunManifest::new(
        RunSpec::Estimate {
            input: args.input.clone(),
            column: args.column.clone(),
            sampling,
            alpha,
            schedule,
            level: args.level,
            init,
            loss_convention: LOSS_CONVENTION.to_string(),
        },
        vec![out.clone()],
    );
    manifest.write(&args.out_dir.join("manifest.json"))?;

    match path.last() {
        Some(p) => {
            println!("returns: {}", series.len());
            println!("VaR of losses (theta): {}", p.theta);
            println!("CVaR of losses (superquantile): {}", p.sq);
            if let (Some(lo), Some(hi)) = (p.ci_lo, p.ci_hi) {
                println!("{}% interval: [{lo}, {hi}]", args.level * 100.0);
            }
        }
        None => println!("only one return; nothing beyond the warm start"),
    }
    println!("wrote {}", out.display());
    Ok(())
}

/// A config file is either a manifest or a flat set of overrides with an
/// optional `preset` key.
fn load_config_file(path: &Path) -> anyhow::Result<(Option<String>, Option<sqstream::ExperimentConfig>, Overrides)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut value: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if value.get("run").is_some() {
        let manifest: RunManifest = serde_json::from_value(value)?;
        return match manifest.run {
            RunSpec::Experiment { preset, config, .. } => Ok((preset, Some(config), Overrides::default())),
            RunSpec::Estimate { .. } => bail!("{} is a manifest of an estimate run", path.display()),
        };
    }
    let preset = match value.as_object_mut().and_then(|o| o.remove("preset")) {
        Some(serde_json::Value::String(s)) => Some(s),
        Some(other) => bail!("\"preset\" must be a string, got {other}"),
        None => None,
    };
    let overrides: Overrides = serde_json::from_value(value).with_context(|| format!("parsing {}", path.display()))?;
    Ok((preset, None, overrides))
}

fn experiment(args: ExperimentArgs) -> anyhow::Result<()> {
    let cli = Overrides {
        alpha: args.alpha,
        n: args.n,
        replicas: args.replicas,
        seed: args.seed,
        model: args.model.clone(),
        level: args.level,
        ..args.schedule.overrides()
    };
    let (file_preset, file_config, file_overrides) = match &args.config {
        Some(p) => load_config_file(p)?,
        None => (None, None, Overrides::default()),
    };
    let preset = match args.preset.as_deref().or(file_preset.as_deref()) {
        Some(name) => Some(Preset::from_name(name)?),
        None => None,
    };
    let base = match (args.preset.is_some(), file_config, preset) {
        (false, Some(cfg), _) => cfg,
        (_, _, Some(p)) => p.config(),
        _ => bail!("give a preset ({}) or a config file that names one", Preset::names().join(", ")),
    };
    let config = cli.or(file_overrides).apply(base)?;
    // Fail on a bad thread count before the run starts.
    execution(args.threads)?;

    let run = run_experiment(preset.map(Preset::name), config, &args.out_dir, args.format, args.threads)?;
    let r = &run.report;
    println!("model {}  alpha {}  n {}  replicas {}", r.config.model, r.config.alpha.value(), r.config.n_steps, r.config.n_replicas);
    println!("theta_alpha {}  sq_alpha {}", r.theta_alpha, r.sq_alpha);
    if let Some(s) = &r.rescaled_theta_summary {
        println!("rescaled theta error: variance {:.4}", s.variance);
    }
    for v in &r.variants {
        let mean_err = v.terminal_errors.iter().sum::<f64>() / v.terminal_errors.len() as f64;
        print!("{:?}: mean terminal error {mean_err:.4e}", v.variant);
        if let Some(s) = &v.rescaled_summary {
            print!("  rescaled variance {:.4}", s.variance);
        }
        if let Some(c) = v.coverage {
            print!("  coverage {c:.4}");
        }
        println!();
    }
    match (&r.constants, &r.constants_unavailable) {
        (Some(c), _) => println!("theory: gamma_theta {:.4}  gamma_sq {:.4}  qsl {:.4}", c.gamma_theta, c.gamma_sq, c.qsl_const),
        (None, Some(why)) => println!("theory: unavailable ({why})"),
        _ => {}
    }
    println!("wrote {} in {:.2}s", args.out_dir.display(), r.wall_clock_secs);
    Ok(())
}

fn print_table(rows: &[(&str, f64)], format: Format) -> anyhow::Result<()> {
    match format {
        Format::Csv => {
            println!("quantity,value");
            for (k, v) in rows {
                println!("{k},{}", fmt_f64(*v));
            }
        }
        Format::Json => {
            let map: serde_json::Map<String, serde_json::Value> = rows.iter().map(|(k, v)| (k.to_string(), serde_json::json!(v))).collect();
            println!("{}", serde_json::to_string_pretty(&map)?);
        }
    }
    Ok(())
}

fn oracle(args: OracleArgs) -> anyhow::Result<()> {
    let model: DistributionModel = args.model.parse()?;
    let alpha = AlphaLevel::new(args.alpha)?;
    let schedule = args.schedule.resolve()?;
    let o = RiskOracle::new(&model, alpha)?;
    let mut rows = vec![
        ("theta_alpha", o.theta_alpha),
        ("sq_alpha", o.sq_alpha),
        ("sigma_sq", o.sigma_sq),
        ("tau_sq", o.tau_sq),
    ];
    if let Some(f) = o.density_at_quantile() {
        rows.push(("density_at_quantile", f));
    }
    match TheoreticalConstants::for_model(&model, alpha, &schedule) {
        Ok(c) => rows.extend([
            ("gamma_theta", c.gamma_theta),
            ("gamma_sq", c.gamma_sq),
            ("nu_sq", c.nu_sq),
            ("qsl_const", c.qsl_const),
            ("lil_const", c.lil_const),
            ("qsl_theta", c.qsl_theta),
            ("lil_theta", c.lil_theta),
        ]),
        Err(e) => eprintln!("limit constants unavailable: {e}"),
    }
    print_table(&rows, args.format)
}

fn pn_check(args: PnCheckArgs) -> anyhow::Result<()> {
    // The quantile gain plays no part in the product.
    let schedule = StepSchedule::power(1.0, args.b_exp, args.b1, args.b_exp)?;
    let p = pn_product(&schedule, args.n);
    let limit = pn_limit(&schedule)?;
    let normalized = limit.normalized(&p);
    let target = limit.target();
    let mut rows = vec![
        ("n", args.n as f64),
        ("first_index", p.start as f64),
        ("ln_p_n", p.ln_value),
        ("normalized", normalized),
        ("limit", target),
        ("relative_error", ((normalized - target) / target).abs()),
    ];
    let frac = args.b1.fract();
    if frac > 0.0 {
        let (lhs, rhs) = euler_gamma_check(frac)?;
        rows.extend([("euler_log_gamma", lhs), ("euler_series", rhs), ("euler_gap", (lhs - rhs).abs())]);
    }
    print_table(&rows, args.format)
}
