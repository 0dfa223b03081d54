//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p sqstream-core --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use sqstream::asymptotics::{pn_limit, pn_product};
use sqstream::experiments::{log_spaced_checkpoints, run_replicas, ExperimentConfig, ExperimentReport};
use sqstream::{euler_gamma_check, AlphaLevel, DistributionModel, EstimatorState, RiskOracle, StepSchedule, Variant};

const THETA_EXP: f64 = 6.931_471_805_599_453; // 10 ln 2
const SQ_EXP: f64 = 16.931_471_805_599_453; // 10 ln 2 + 10

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn alpha(a: f64) -> AlphaLevel {
    AlphaLevel::new(a).unwrap()
}

fn exp_model() -> DistributionModel {
    DistributionModel::exponential(0.1).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn panel_config() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(exp_model(), alpha(0.5), StepSchedule::finance_default(), 1_000_000, 20);
    cfg.base_seed = 0;
    cfg.checkpoints = log_spaced_checkpoints(1_000_000, 13);
    cfg.lil_window = Some((1_000, 1_000_000));
    cfg
}

/// 1. Almost-sure convergence on a 20-seed panel, n = 10^6.
fn almost_sure(panel: &ExperimentReport) -> Outcome {
    let ok = panel
        .replicas
        .iter()
        .filter(|r| {
            (r.theta - THETA_EXP).abs() < 0.1 && (r.sq_convex - SQ_EXP).abs() < 0.5 && (r.sq_standard - SQ_EXP).abs() < 0.5
        })
        .count();
    let frac = ok as f64 / panel.replicas.len() as f64;

    // Runtime of one replica.
    let mut single = panel_config();
    single.n_replicas = 1;
    single.checkpoints.clear();
    single.lil_window = None;
    let t = Instant::now();
    let r = run_replicas(&single).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let first = &r.replicas[0];
    outcome(
        frac >= 0.95 && secs < 5.0,
        format!(
            "{ok}/20 seeds within bands (need >= 95%); seed 0: theta={:.4} sq_convex={:.4} sq_standard={:.4}; single run {secs:.2}s (< 5s)",
            first.theta, first.sq_convex, first.sq_standard
        ),
    )
}

fn clt_config(schedule: StepSchedule, replicas: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(exp_model(), alpha(0.5), schedule, 100_000, replicas);
    cfg.base_seed = 1;
    cfg
}

/// 2. Joint CLT variances, M = 2000, n = 10^5.
fn clt_variances(report: &ExperimentReport) -> Outcome {
    let c = report.constants.unwrap();
    let th = report.rescaled_theta_summary.unwrap();
    let cv = report.variant(Variant::Convex).unwrap().rescaled_summary.unwrap();
    let sd = report.variant(Variant::Standard).unwrap().rescaled_summary.unwrap();
    let theta_ok = rel(th.variance, 12.5) < 0.10 && (c.gamma_theta - 12.5).abs() < 1e-9;
    let sq_ok = rel(cv.variance, 337.5) < 0.10 && (c.gamma_sq - 337.5).abs() < 1e-8;
    let shape_ok = cv.skewness.abs() < 0.2 && cv.excess_kurtosis.abs() < 0.5 && th.skewness.abs() < 0.2 && th.excess_kurtosis.abs() < 0.5;
    let agree = rel(sd.variance, cv.variance) < 0.15;
    outcome(
        theta_ok && sq_ok && shape_ok && agree && report.wall_clock_secs < 60.0,
        format!(
            "var n^(1/3)(theta-q)={:.3} (12.5 +-10%), var sqrt(n)(sq_convex-sq)={:.2} (337.5 +-10%), standard={:.2} (within 15% of convex); \
             skew/exkurt theta {:.3}/{:.3} convex {:.3}/{:.3} (|.|<0.2/0.5); {:.1}s (< 60s)",
            th.variance, cv.variance, sd.variance, th.skewness, th.excess_kurtosis, cv.skewness, cv.excess_kurtosis, report.wall_clock_secs
        ),
    )
}

/// 3. Asymptotically diagonal covariance.
fn diagonal(report: &ExperimentReport) -> Outcome {
    let r = report.variant(Variant::Convex).unwrap().correlation_with_theta.unwrap();
    outcome(r.abs() < 0.08, format!("corr(theta, sq_convex) = {r:.4} (|.| < 0.08)"))
}

/// 4. Studentized 95% interval coverage, M = 1000, n = 10^5.
fn coverage() -> Outcome {
    let mut cfg = clt_config(StepSchedule::finance_default(), 1000);
    cfg.base_seed = 2;
    cfg.ci_level = Some(0.95);
    cfg.variants = vec![Variant::Convex];
    let report = run_replicas(&cfg).unwrap();
    let cov = report.variant(Variant::Convex).unwrap().coverage.unwrap();
    outcome((0.93..=0.97).contains(&cov), format!("coverage = {cov:.3} (in [0.93, 0.97])"))
}

/// 5. Quadratic strong law, single run n = 10^6.
fn qsl(panel: &ExperimentReport) -> Outcome {
    let v = panel.replicas[0].qsl_convex.unwrap();
    outcome(
        rel(v, 337.5) < 0.25,
        format!("(1/ln n) sum (sq_convex_k - sq)^2 = {v:.2} for seed 0 (337.5 +-25%, logarithmic convergence)"),
    )
}

/// 6. Exact running-mean reduction under b_n = 1/(n+1).
fn sample_mean_reduction() -> Outcome {
    let a = alpha(0.7);
    let sched = StepSchedule::harmonic_shifted(5.0, 2.0 / 3.0).unwrap();
    let xs = exp_model().sample(123, 100_001).unwrap();
    let theta0 = 0.0;
    // The first observation plays the role of X_1 and fixes the initial
    // superquantile iterates; the recursion then consumes the rest.
    let y = |x: f64, t: f64| if x > t { x / (1.0 - a.value()) } else { 0.0 };
    let z = |x: f64, t: f64| t + if x > t { (x - t) / (1.0 - a.value()) } else { 0.0 };
    let mut est = EstimatorState::new(a, sched, theta0, y(xs[0], theta0)).unwrap();
    // Separate starting value for the convex iterate.
    let mut est_cvx = EstimatorState::new(a, sched, theta0, z(xs[0], theta0)).unwrap();

    let mut sum_y = y(xs[0], theta0);
    let mut comp_y = 0.0;
    let mut sum_z = z(xs[0], theta0);
    let mut comp_z = 0.0;
    let mut worst: f64 = 0.0;
    let kahan = |sum: &mut f64, comp: &mut f64, v: f64| {
        let t = v - *comp;
        let s = *sum + t;
        *comp = (s - *sum) - t;
        *sum = s;
    };
    for (k, &x) in xs.iter().enumerate().skip(1) {
        let t = est.theta();
        kahan(&mut sum_y, &mut comp_y, y(x, t));
        kahan(&mut sum_z, &mut comp_z, z(x, t));
        est.ingest(x).unwrap();
        est_cvx.ingest(x).unwrap();
        let count = (k + 1) as f64;
        worst = worst.max(rel(est.sq_standard(), sum_y / count)).max(rel(est_cvx.sq_convex(), sum_z / count));
    }
    outcome(worst <= 1e-12, format!("max relative deviation from running means over 1e5 steps = {worst:.2e} (<= 1e-12)"))
}

fn model_panel() -> Vec<DistributionModel> {
    vec![
        DistributionModel::exponential(0.1).unwrap(),
        DistributionModel::gamma(4.0, 3.0).unwrap(),
        DistributionModel::pareto(1.0, 3.0).unwrap(),
        DistributionModel::normal(0.0, 1.0).unwrap(),
        DistributionModel::normal(-2.0, 0.5).unwrap(),
        // 20 distinct points, so P(X > theta_alpha) = 1 - alpha at every tested level.
        DistributionModel::empirical((1..=20).map(|i| (i as f64).sqrt() * 3.0 - 4.0).collect()).unwrap(),
    ]
}

/// 7. Variance identity and ordering.
fn variance_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut ordering_ok = true;
    let mut cases = 0;
    for model in model_panel() {
        for a in [0.1, 0.5, 0.9, 0.95] {
            let o = RiskOracle::new(&model, alpha(a)).unwrap();
            worst = worst.max(rel(o.tau_sq_from_sigma_sq(), o.tau_sq));
            if o.theta_alpha >= 0.0 && o.tau_sq > o.sigma_sq * (1.0 + 1e-12) {
                ordering_ok = false;
            }
            cases += 1;
        }
    }
    outcome(
        worst < 1e-8 && ordering_ok,
        format!("{cases} model x level cases: max relative identity gap {worst:.2e} (< 1e-8); tau^2 <= sigma^2 when theta >= 0: {ordering_ok}"),
    )
}

/// 8. Gain-product asymptotics and Euler's log-gamma series.
fn pn_asymptotics() -> Outcome {
    let sched = StepSchedule::power(1.0, 2.0 / 3.0, 0.75, 1.0).unwrap();
    let p = pn_product(&sched, 1_000_000);
    let ratio = pn_limit(&sched).unwrap().normalized(&p);
    let gamma_quarter = statrs::function::gamma::gamma(0.25);
    let err = rel(ratio, gamma_quarter);
    let mut euler_gap: f64 = 0.0;
    for b1 in [0.25, 0.5, 0.75] {
        let (lhs, rhs) = euler_gamma_check(b1).unwrap();
        euler_gap = euler_gap.max((lhs - rhs).abs());
    }
    outcome(
        err < 1e-3 && euler_gap < 1e-10,
        format!("P_n / n^(3/4) = {ratio:.6} vs Gamma(1/4) = {gamma_quarter:.6}, rel err {err:.2e} (< 1e-3); Euler series gap {euler_gap:.2e} (< 1e-10)"),
    )
}

/// 9. Convexity and Taylor bounds of the drift functions.
fn drift_bounds() -> Outcome {
    let mut worst_convexity: f64 = 0.0;
    let mut violations = Vec::new();
    for model in [DistributionModel::exponential(0.1).unwrap(), DistributionModel::gamma(4.0, 3.0).unwrap()] {
        for a in [0.5, 0.9] {
            let al = alpha(a);
            let q = model.quantile(al).unwrap();
            let sq = model.superquantile(al).unwrap();
            let f_q = model.pdf(q).unwrap();
            let grid: Vec<f64> = (0..201).map(|i| q - 2.0 + 4.0 * i as f64 / 200.0).collect();
            // Sup-norms over the window, on a finer grid.
            let fine = (0..=2000).map(|i| q - 2.0 + 4.0 * i as f64 / 2000.0);
            let (mut f_sup, mut phi_sup) = (0.0f64, 0.0f64);
            for t in fine {
                let f = model.pdf(t).unwrap();
                f_sup = f_sup.max(f);
                phi_sup = phi_sup.max((f + t * model.pdf_derivative(t).unwrap()).abs());
            }
            let drift: Vec<_> = grid.iter().map(|&t| model.drift(al, t).unwrap()).collect();
            for w in drift.windows(3) {
                let second = w[0].l - 2.0 * w[1].l + w[2].l;
                worst_convexity = worst_convexity.min(second);
            }
            for (&t, d) in grid.iter().zip(&drift) {
                let dt2 = (t - q) * (t - q);
                let gap_l = d.l - sq;
                let bound_l = f_sup / (2.0 * al.tail()) * dt2;
                if gap_l < -1e-10 || gap_l > bound_l + 1e-10 {
                    violations.push(format!("{model} a={a} L at {t:.3}"));
                }
                let lin = d.h - sq + q * f_q / al.tail() * (t - q);
                if lin.abs() > phi_sup / (2.0 * al.tail()) * dt2 + 1e-10 {
                    violations.push(format!("{model} a={a} H at {t:.3}"));
                }
            }
        }
    }
    outcome(
        worst_convexity >= -1e-8 && violations.is_empty(),
        format!(
            "min second difference of L = {worst_convexity:.2e} (>= -1e-8); sandwich/quadratic-bound violations: {}",
            if violations.is_empty() { "none".to_string() } else { violations.join(", ") }
        ),
    )
}

/// 10. Slow superquantile gain, b = 0.8.
fn slow_b() -> Outcome {
    let sched = StepSchedule::power(5.0, 0.6, 1.0, 0.8).unwrap();
    let mut cfg = clt_config(sched, 2000);
    cfg.base_seed = 3;
    cfg.variants = vec![Variant::Convex];
    let report = run_replicas(&cfg).unwrap();
    let v = report.variant(Variant::Convex).unwrap().rescaled_summary.unwrap().variance;
    let target = report.constants.unwrap().gamma_sq;
    outcome(
        rel(v, 150.0) < 0.15 && (target - 150.0).abs() < 1e-8,
        format!("var n^0.4 (sq_convex - sq) = {v:.2} (150 +-15%)"),
    )
}

/// Monitored iterated-logarithm envelope.
fn lil_envelope(panel: &ExperimentReport) -> Outcome {
    let c = panel.constants.unwrap().lil_const;
    let frac = panel.variant(Variant::Convex).unwrap().lil_within_envelope.unwrap();
    let worst = panel.replicas.iter().filter_map(|r| r.lil_max_convex).fold(0.0, f64::max);
    outcome(
        frac >= 0.95 && (c - 18.371).abs() < 1e-3,
        format!("{:.0}% of seeds stay below 1.5 x {c:.3} on [1e3, 1e6] (need >= 95%); worst running max {worst:.2}", frac * 100.0),
    )
}

fn main() -> ExitCode {
    let started = Instant::now();
    let mut results: Vec<(&str, Outcome)> = Vec::new();

    let panel = run_replicas(&panel_config()).unwrap();
    results.push(("1 almost-sure convergence", almost_sure(&panel)));

    let clt = run_replicas(&clt_config(StepSchedule::finance_default(), 2000)).unwrap();
    results.push(("2 joint CLT variances", clt_variances(&clt)));
    results.push(("3 diagonal covariance", diagonal(&clt)));
    results.push(("4 studentized CI coverage", coverage()));
    results.push(("5 QSL soft check", qsl(&panel)));
    results.push(("6 sample-mean reduction", sample_mean_reduction()));
    results.push(("7 variance identity", variance_identity()));
    results.push(("8 P_n asymptotics", pn_asymptotics()));
    results.push(("9 drift-function bounds", drift_bounds()));
    results.push(("10 slow-b regime", slow_b()));
    results.push(("LIL monitored envelope", lil_envelope(&panel)));

    let mut failed = 0;
    for (name, o) in &results {
        println!("[{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        results.len() - failed,
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
