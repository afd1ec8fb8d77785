//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits nonzero if any criterion fails.

use std::cell::Cell;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6, PI};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use cartpole_pid::cli::commands::TrajectoryMetrics;
use cartpole_pid::cli::scenario::{MAE_OPTIMUM, RMSE_OPTIMUM, TUNING_SEED};
use cartpole_pid::control::{PidController, PidGains, DEFAULT_SATURATION};
use cartpole_pid::dynamics::{accelerations, energies, net_force, State, SystemParams};
use cartpole_pid::objective::{angle_errors, mae, rmse, Metric, ObjectiveSpec};
use cartpole_pid::optimizer::{minimize, OptimizerConfig, TuneResult};
use cartpole_pid::simulate::{run, SimConfig, Trajectory};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Scenario thresholds over the last 5 s of a 15 s run.
const P_ONLY_MIN_MAX_ABS: f64 = 0.05;
const PD_MIN_ABS_MEAN: f64 = 0.01;
const PID_MAX_ABS: f64 = 0.02;
const PID_MAX_ABS_MEAN: f64 = 0.005;
const TAIL_START: f64 = 10.0;

const MANUAL_P: PidGains = PidGains::new(-200.0, 0.0, 0.0);
const MANUAL_PD: PidGains = PidGains::new(-200.0, 0.0, -100.0);
const MANUAL_PID: PidGains = PidGains::new(-200.0, -20.0, -100.0);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

#[derive(Debug, Clone, Copy)]
struct Tail {
    max_abs: f64,
    mean: f64,
}

fn tail(t: &Trajectory) -> Tail {
    let s = t.after(TAIL_START);
    Tail {
        max_abs: s.iter().map(|s| s.state.theta.abs()).fold(0.0, f64::max),
        mean: s.iter().map(|s| s.state.theta).sum::<f64>() / s.len() as f64,
    }
}

fn pid_thresholds(t: &Trajectory) -> (bool, Tail) {
    let tl = tail(t);
    let ok = !t.diverged()
        && t.len() == 15_000
        && tl.max_abs < PID_MAX_ABS
        && tl.mean.abs() < PID_MAX_ABS_MEAN;
    (ok, tl)
}

fn sim(gains: PidGains, theta0: f64) -> Trajectory {
    run(&SimConfig::new(gains).with_theta0(theta0)).unwrap()
}

fn random_state(rng: &mut ChaCha8Rng) -> State {
    State::new(
        rng.gen_range(-10.0..=10.0),
        rng.gen_range(-10.0..=10.0),
        rng.gen_range(-PI..=PI),
        rng.gen_range(-10.0..=10.0),
    )
}

/// Residuals of the cart and rod equations, written out independently of
/// the solver.
fn residuals(p: &SystemParams, s: &State, u: f64) -> (f64, f64, f64) {
    let a = accelerations(p, s, u);
    let f = net_force(p, u);
    let (m, l) = (p.ball_mass, p.rod_length);
    let cart = (p.cart_mass + m) * a.x_ddot - m * l * a.theta_ddot * s.theta.cos()
        + m * l * s.theta_dot.powi(2) * s.theta.sin()
        - f;
    let rod = -a.x_ddot * s.theta.cos() + l * a.theta_ddot - p.gravity * s.theta.sin();
    (cart, rod, f)
}

fn c1_residuals() -> Outcome {
    let p = SystemParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let mut bad = 0;
    for _ in 0..10_000 {
        let s = random_state(&mut rng);
        let u = rng.gen_range(-500.0..=500.0);
        let (r1, r2, f) = residuals(&p, &s, u);
        let scale = f.abs().max(1.0);
        let ratio = r1.abs().max(r2.abs()) / scale;
        worst = worst.max(ratio);
        if !(r1.abs() < 1e-9 * scale && r2.abs() < 1e-9 * scale) {
            bad += 1;
        }
    }
    outcome(
        bad == 0,
        format!("10000 states, {bad} violations, worst residual/max(1,|F|) = {worst:.2e} (< 1e-9)"),
    )
}

fn c2_singularity() -> Outcome {
    let p = SystemParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut det_ok = true;
    let mut finite = true;
    for _ in 0..100_000 {
        let theta: f64 = rng.gen_range(-PI..=PI);
        let det = p.rod_length * (p.cart_mass + p.ball_mass * theta.sin().powi(2));
        det_ok &= det >= p.rod_length * p.cart_mass && det > 0.0;
        let mut s = random_state(&mut rng);
        s.theta = theta;
        let a = accelerations(&p, &s, rng.gen_range(-500.0..=500.0));
        finite &= a.x_ddot.is_finite() && a.theta_ddot.is_finite();
    }
    let mut max_gap = 0.0f64;
    for centre in [FRAC_PI_2, -FRAC_PI_2] {
        for _ in 0..1000 {
            let mut s = random_state(&mut rng);
            let u = rng.gen_range(-500.0..=500.0);
            s.theta = centre;
            let mid = accelerations(&p, &s, u);
            finite &= mid.x_ddot.is_finite() && mid.theta_ddot.is_finite();
            for off in [-1e-9, 1e-9] {
                s.theta = centre + off;
                let a = accelerations(&p, &s, u);
                finite &= a.theta_ddot.is_finite();
                max_gap = max_gap.max((a.theta_ddot - mid.theta_ddot).abs());
            }
        }
    }
    outcome(
        det_ok && finite && max_gap < 1e-6,
        format!(
            "det >= L*M over 1e5 theta: {det_ok}; all finite incl. +-pi/2: {finite}; \
             max branch gap at +-pi/2 +- 1e-9 = {max_gap:.2e} (< 1e-6)"
        ),
    )
}

fn energy_drift(dt: f64) -> f64 {
    let mut cfg = SimConfig::new(PidGains::default());
    cfg.params.friction_coefficient = 0.0;
    cfg.dt = dt;
    cfg.duration = 5.0;
    let e0 = energies(&cfg.params, &cfg.initial_state).total();
    run(&cfg)
        .unwrap()
        .samples
        .iter()
        .map(|s| (energies(&cfg.params, &s.state).total() - e0).abs())
        .fold(0.0, f64::max)
}

fn c3_energy() -> Outcome {
    let coarse = energy_drift(1e-3);
    let fine = energy_drift(1e-4);
    outcome(
        fine < coarse,
        format!("max |E - E0| over 5 s: dt=1e-3 -> {coarse:.4e} J, dt=1e-4 -> {fine:.4e} J"),
    )
}

fn c4_figures() -> Outcome {
    let p = tail(&sim(MANUAL_P, FRAC_PI_4));
    let pd = tail(&sim(MANUAL_PD, FRAC_PI_4));
    let pid_traj = sim(MANUAL_PID, FRAC_PI_4);
    let (pid_ok, pid) = pid_thresholds(&pid_traj);
    let pass = p.max_abs > P_ONLY_MIN_MAX_ABS && pd.mean.abs() > PD_MIN_ABS_MEAN && pid_ok;
    outcome(
        pass,
        format!(
            "P max|th| {:.4} (> {P_ONLY_MIN_MAX_ABS}); PD |mean| {:.4} (> {PD_MIN_ABS_MEAN}); \
             PID max|th| {:.4} (< {PID_MAX_ABS}), |mean| {:.5} (< {PID_MAX_ABS_MEAN})",
            p.max_abs,
            pd.mean.abs(),
            pid.max_abs,
            pid.mean.abs()
        ),
    )
}

struct RmseTuning {
    result: TuneResult,
    elapsed: Duration,
    seed_cost: f64,
    manual_cost: f64,
}

fn tune_rmse() -> RmseTuning {
    let spec = ObjectiveSpec::new(Metric::Rmse);
    let start = Instant::now();
    let result = minimize(&spec, &OptimizerConfig::new(TUNING_SEED)).unwrap();
    let elapsed = start.elapsed();
    RmseTuning {
        seed_cost: spec.evaluate(TUNING_SEED).unwrap(),
        manual_cost: spec.evaluate(MANUAL_PID).unwrap(),
        result,
        elapsed,
    }
}

fn c5_tuning(t: &RmseTuning) -> Outcome {
    let r = &t.result;
    let (traj_ok, tl) = pid_thresholds(&sim(r.best_gains, FRAC_PI_4));
    let pass = r.best_cost <= t.seed_cost
        && r.best_cost <= t.manual_cost
        && traj_ok
        && t.elapsed < Duration::from_secs(60);
    let g = r.best_gains;
    outcome(
        pass,
        format!(
            "best ({:.2}, {:.2}, {:.2}) cost {:.6} <= seed {:.6}: {}, <= manual {:.6}: {}; \
             tuned run max|th| {:.4} (< {PID_MAX_ABS}), |mean| {:.5} (< {PID_MAX_ABS_MEAN}); \
             {} evals in {:.2?} (< 60 s)",
            g.kp,
            g.ki,
            g.kd,
            r.best_cost,
            t.seed_cost,
            r.best_cost <= t.seed_cost,
            t.manual_cost,
            r.best_cost <= t.manual_cost,
            tl.max_abs,
            tl.mean.abs(),
            r.evaluation_count,
            t.elapsed
        ),
    )
}

fn c6_reference_optimum(t: &RmseTuning) -> Outcome {
    let spec = ObjectiveSpec::new(Metric::Rmse);
    let reference_cost = spec.evaluate(RMSE_OPTIMUM).unwrap();
    let (traj_ok, tl) = pid_thresholds(&sim(RMSE_OPTIMUM, FRAC_PI_4));
    let ratio = t.result.best_cost / reference_cost;
    outcome(
        traj_ok && ratio <= 1.05,
        format!(
            "reference optimum: max|th| {:.2e} (< {PID_MAX_ABS}), |mean| {:.2e} (< {PID_MAX_ABS_MEAN}), \
             cost {reference_cost:.6}; tuned cost {:.6} = {ratio:.4} x reference (<= 1.05)",
            tl.max_abs,
            tl.mean.abs(),
            t.result.best_cost
        ),
    )
}

fn c7_alternate_start(t: &RmseTuning) -> Outcome {
    let (ok, tl) = pid_thresholds(&sim(t.result.best_gains, FRAC_PI_6));
    let (reference_ok, reference) = pid_thresholds(&sim(RMSE_OPTIMUM, FRAC_PI_6));
    outcome(
        ok,
        format!(
            "tuned gains from pi/6: max|th| {:.4} (< {PID_MAX_ABS}), |mean| {:.5} (< {PID_MAX_ABS_MEAN}) \
             [reference optimum from pi/6: max {:.4}, |mean| {:.5}, meets: {reference_ok}]",
            tl.max_abs,
            tl.mean.abs(),
            reference.max_abs,
            reference.mean.abs()
        ),
    )
}

fn c8_mae() -> Outcome {
    let spec = ObjectiveSpec::new(Metric::Mae);
    let evaluated = Cell::new(0usize);
    let violations = Cell::new(0usize);
    let objective = |g: PidGains| {
        let ev = spec.evaluate_detailed(g).unwrap();
        if !ev.trajectory.diverged() {
            let e = angle_errors(&ev.trajectory, 0.0);
            evaluated.set(evaluated.get() + 1);
            if rmse(&e) < mae(&e) {
                violations.set(violations.get() + 1);
            }
        }
        ev.cost
    };
    let r = minimize(&objective, &OptimizerConfig::new(TUNING_SEED)).unwrap();
    let traj = sim(r.best_gains, FRAC_PI_4);
    let last = tail(&traj);
    let before = traj
        .samples
        .iter()
        .filter(|s| s.t > 5.0 && s.t <= TAIL_START)
        .map(|s| s.state.theta.abs())
        .fold(0.0, f64::max);
    let stabilizing = !traj.diverged() && last.max_abs < P_ONLY_MIN_MAX_ABS && last.max_abs <= before;
    let g = r.best_gains;
    outcome(
        stabilizing && violations.get() == 0 && evaluated.get() > 0,
        format!(
            "MAE best ({:.2}, {:.2}, {:.2}) cost {:.6}; last-5 s max|th| {:.4} (< {P_ONLY_MIN_MAX_ABS}, \
             <= previous 5 s {:.4}); RMSE >= MAE on {}/{} evaluated trajectories",
            g.kp,
            g.ki,
            g.kd,
            r.best_cost,
            last.max_abs,
            before,
            evaluated.get() - violations.get(),
            evaluated.get()
        ),
    )
}

fn c9_controller() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut saturation = true;
    let mut first_zero = true;
    let mut zero_gain = true;
    let mut linear = true;
    let mut linear_checked = 0;
    for _ in 0..2000 {
        let gains = PidGains::new(
            rng.gen_range(-1e5..1e5),
            rng.gen_range(-1e5..1e5),
            rng.gen_range(-1e5..1e5),
        );
        let mut pid = PidController::new(gains);
        let mut d_only = PidController::new(PidGains::new(0.0, 0.0, gains.kd));
        let mut zero = PidController::new(PidGains::default());
        first_zero &= d_only.update(rng.gen_range(-10.0..10.0), 0.001).unwrap() == 0.0;
        for _ in 0..50 {
            let m = rng.gen_range(-10.0..10.0);
            saturation &= pid.update(m, 0.001).unwrap().abs() <= DEFAULT_SATURATION;
            zero_gain &= zero.update(m, 0.001).unwrap() == 0.0;
        }

        let kp = rng.gen_range(-100.0..100.0);
        let kd = rng.gen_range(-0.2..0.2);
        let mut a = PidController::new(PidGains::new(kp, 0.0, kd));
        let mut b = PidController::new(PidGains::new(2.0 * kp, 0.0, 2.0 * kd));
        for _ in 0..20 {
            let m = rng.gen_range(-1.0..1.0);
            let (ua, ub) = (a.update(m, 0.001).unwrap(), b.update(m, 0.001).unwrap());
            if ub.abs() < DEFAULT_SATURATION {
                linear_checked += 1;
                linear &= (ub - 2.0 * ua).abs() <= 1e-12 * ub.abs();
            }
        }
    }
    outcome(
        saturation && first_zero && zero_gain && linear && linear_checked > 0,
        format!(
            "|u| <= 500: {saturation}; first-call derivative 0: {first_zero}; zero gains -> 0: {zero_gain}; \
             doubling (Kp, Kd) doubles u to 1e-12 on {linear_checked} unsaturated steps: {linear}"
        ),
    )
}

fn cartpole(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_cartpole"))
        .args(args)
        .output()
        .expect("run cartpole binary")
}

fn c10_cli(dir: &Path) -> Outcome {
    let csv = dir.join("fig4.csv");
    let out = cartpole(&["simulate", "--scenario", "fig4", "--out", csv.to_str().unwrap()]);
    if !out.status.success() {
        return outcome(false, format!("simulate failed: {}", String::from_utf8_lossy(&out.stderr)));
    }
    let in_memory = TrajectoryMetrics::from_samples(&sim(MANUAL_PID, FRAC_PI_4).samples);
    let report = dir.join("self.txt");
    let csv_s = csv.to_str().unwrap();
    let out = cartpole(&["compare", csv_s, csv_s, "--out", report.to_str().unwrap()]);
    let text = std::fs::read_to_string(&report).unwrap_or_default();
    let value = |key: &str| -> f64 {
        text.lines()
            .find_map(|l| l.strip_prefix(&format!("{key} = ")))
            .and_then(|v| v.parse().ok())
            .unwrap_or(f64::NAN)
    };
    let pairs = [
        ("rmse", in_memory.rmse),
        ("mae", in_memory.mae),
        ("max_abs_theta", in_memory.max_abs_theta),
        ("final_third_mean_abs_theta", in_memory.final_third_mean_abs_theta),
    ];
    let worst = pairs
        .iter()
        .map(|(k, v)| (value(&format!("{k}.a")) - v).abs())
        .fold(0.0, f64::max);
    let deltas_zero = pairs
        .iter()
        .all(|(k, _)| value(&format!("{k}.delta")) == 0.0);

    let manifest = csv.with_extension("manifest");
    let replay = dir.join("replay.csv");
    let out2 = cartpole(&[
        "simulate",
        "--config",
        manifest.to_str().unwrap(),
        "--out",
        replay.to_str().unwrap(),
    ]);
    let identical = std::fs::read(&csv).ok().is_some_and(|a| {
        std::fs::read(&replay).ok().is_some_and(|b| a == b)
    });
    outcome(
        out.status.success() && out2.status.success() && worst <= 1e-12 && deltas_zero && identical,
        format!(
            "CSV -> compare metric error {worst:.1e} (<= 1e-12), self-deltas 0: {deltas_zero}; \
             manifest replay byte-identical: {identical}"
        ),
    )
}

#[allow(clippy::vec_init_then_push)]
fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    results.push((1, "dynamics residual suite", c1_residuals()));
    results.push((2, "determinant positivity and singularity continuity", c2_singularity()));
    results.push((3, "energy drift shrinks with dt", c3_energy()));
    results.push((4, "figure-scenario ordering (P / PD / PID)", c4_figures()));
    let tuning = tune_rmse();
    results.push((5, "RMSE tuning improvement", c5_tuning(&tuning)));
    results.push((6, "reference optimum consistency", c6_reference_optimum(&tuning)));
    results.push((7, "alternate start at pi/6", c7_alternate_start(&tuning)));
    results.push((8, "MAE variant", c8_mae()));
    results.push((9, "controller unit suite", c9_controller()));
    results.push((10, "CLI round-trip and manifest replay", c10_cli(dir.path())));

    // reference MAE gains, for reference only
    let mae_tail = tail(&sim(MAE_OPTIMUM, FRAC_PI_4));
    println!(
        "info: reference MAE gains last-5 s max|th| {:.2e}, mean {:.2e}",
        mae_tail.max_abs, mae_tail.mean
    );

    let mut failed = 0;
    for (id, name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {id:>2}: {name}: {}", o.detail);
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
