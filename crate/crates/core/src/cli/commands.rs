//! The `simulate`, `tune` and `compare` subcommands.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::objective::{mae, rmse};
use crate::optimizer::{tune, TuneResult};
use crate::simulate::{run, Sample, Trajectory};

use super::config::{format_gains, parse_gains, parse_number, RunConfig};
use super::csv::{parse_trajectory, write_trajectory};
use super::manifest::RunManifest;
use super::svg::{LineChart, Series};
use super::{write_file, CliError, CliResult};

/// Options shared by `simulate` and `tune`. Values are kept as text so
/// that parse failures surface as usage errors naming the flag.
#[derive(Debug, Clone, Default)]
pub struct RunArgs {
    pub config: Option<PathBuf>,
    pub scenario: Option<String>,
    pub metric: Option<String>,
    pub seed: Option<String>,
    pub theta0: Option<String>,
    pub dt: Option<String>,
    pub duration: Option<String>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct CompareArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    pub out: Option<PathBuf>,
}

fn flag<T>(name: &str, r: Result<T, String>) -> CliResult<T> {
    r.map_err(|e| CliError::usage(format!("--{name}: {e}")))
}

/// Defaults, then `--scenario`, then the config file, then the remaining
/// flags. `--theta0` is left to the caller.
pub fn resolve_config(args: &RunArgs) -> CliResult<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(name) = &args.scenario {
        cfg.apply_scenario(flag("scenario", name.parse())?);
    }
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        cfg.apply_text(&text)
            .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    }
    if let Some(m) = &args.metric {
        cfg.metric = flag("metric", m.parse())?;
    }
    if let Some(s) = &args.seed {
        cfg.seed = flag("seed", parse_gains(s))?;
    }
    if let Some(v) = &args.dt {
        cfg.sim.dt = flag("dt", parse_number(v))?;
    }
    if let Some(v) = &args.duration {
        cfg.sim.duration = flag("duration", parse_number(v))?;
    }
    Ok(cfg)
}

#[derive(Debug, Clone)]
pub struct SimulateOutput {
    pub trajectory: Trajectory,
    pub csv: PathBuf,
    pub manifest: PathBuf,
    pub svg: PathBuf,
}

fn default_stem(cfg: &RunConfig) -> String {
    cfg.scenario.map_or("run".to_string(), |s| s.name().to_string())
}

/// Run one simulation and write `<out>` (CSV), `<out>.manifest` and
/// `<out>.svg`.
pub fn cmd_simulate(args: &RunArgs) -> CliResult<SimulateOutput> {
    let mut cfg = resolve_config(args)?;
    if let Some(v) = &args.theta0 {
        cfg.sim.initial_state.theta = flag("theta0", parse_number(v))?;
    }
    let csv = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", default_stem(&cfg))));
    simulate_to(&cfg, &csv)
}

fn simulate_to(cfg: &RunConfig, csv: &Path) -> CliResult<SimulateOutput> {
    let trajectory = run(&cfg.sim)?;
    let manifest_path = csv.with_extension("manifest");
    let svg = csv.with_extension("svg");

    write_file(csv, &write_trajectory(&trajectory.samples))?;
    let mut manifest = RunManifest::new("simulate", cfg).with_outputs(csv, &svg);
    manifest.samples = trajectory.len();
    manifest.diverged_at = trajectory.diverged_at;
    write_file(&manifest_path, &manifest.render())?;

    let g = cfg.sim.controller.gains;
    let title = format!(
        "Rod angle, (Kp, Ki, Kd) = ({}, {}, {}), theta0 = {:.4} rad",
        g.kp, g.ki, g.kd, cfg.sim.initial_state.theta
    );
    let chart = LineChart {
        title,
        x_label: "t [s]".into(),
        y_label: "theta [rad]".into(),
        series: vec![Series {
            label: "theta".into(),
            points: trajectory.samples.iter().map(|s| (s.t, s.state.theta)).collect(),
        }],
    };
    write_file(&svg, &chart.render())?;

    if let Some(k) = trajectory.diverged_at {
        eprintln!(
            "warning: state became non-finite at update {k} (t = {}); trajectory truncated",
            trajectory.samples[k].t
        );
    }
    Ok(SimulateOutput {
        trajectory,
        csv: csv.to_path_buf(),
        manifest: manifest_path,
        svg,
    })
}

#[derive(Debug, Clone)]
pub struct TuneOutput {
    pub result: TuneResult,
    pub report: PathBuf,
    pub history: PathBuf,
    pub tuned: SimulateOutput,
}

/// Tune from the seed, then write `report.txt`, `cost_history.csv` and the
/// tuned run (`tuned.csv` with its manifest and plot) into the `--out`
/// directory. `--theta0` sets the start angle of the tuned run only; the
/// search itself starts from the configured `theta0`.
pub fn cmd_tune(args: &RunArgs) -> CliResult<TuneOutput> {
    let cfg = resolve_config(args)?;
    let replay_theta0 = match &args.theta0 {
        Some(v) => flag("theta0", parse_number(v))?,
        None => cfg.sim.initial_state.theta,
    };
    let dir = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("tune_{}", default_stem(&cfg))));

    let result = tune(&cfg.objective_spec(), &cfg.optimizer_config())?;
    if !result.converged {
        eprintln!(
            "warning: optimizer stopped after {} evaluations without meeting the tolerance",
            result.evaluation_count
        );
    }

    let mut report = String::from("# tuning report\n");
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(report, "{k} = {v}");
    };
    kv("metric", cfg.metric.to_string());
    kv("seed", format_gains(cfg.seed));
    kv("initial_cost", format!("{}", result.initial_cost));
    kv("k_p", format!("{}", result.best_gains.kp));
    kv("k_i", format!("{}", result.best_gains.ki));
    kv("k_d", format!("{}", result.best_gains.kd));
    kv("best_cost", format!("{}", result.best_cost));
    kv("evaluations", result.evaluation_count.to_string());
    kv("iterations", result.iterations.to_string());
    kv("converged", result.converged.to_string());
    kv("replay_theta0", format!("{replay_theta0}"));
    let report_path = dir.join("report.txt");
    write_file(&report_path, &report)?;

    let mut history = String::from("iteration,best_cost\n");
    for (i, c) in result.cost_history.iter().enumerate() {
        let _ = writeln!(history, "{i},{c:.16e}");
    }
    let history_path = dir.join("cost_history.csv");
    write_file(&history_path, &history)?;

    let mut tuned_cfg = cfg.clone();
    tuned_cfg.sim.controller.gains = result.best_gains;
    tuned_cfg.sim.initial_state.theta = replay_theta0;
    let tuned = simulate_to(&tuned_cfg, &dir.join("tuned.csv"))?;

    Ok(TuneOutput {
        result,
        report: report_path,
        history: history_path,
        tuned,
    })
}

/// Summary statistics of a rod-angle series (target 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryMetrics {
    pub rmse: f64,
    pub mae: f64,
    pub max_abs_theta: f64,
    /// Mean `|theta|` over the last third of the samples.
    pub final_third_mean_abs_theta: f64,
}

impl TrajectoryMetrics {
    pub fn from_samples(samples: &[Sample]) -> Self {
        let theta: Vec<f64> = samples.iter().map(|s| s.state.theta).collect();
        let n = theta.len();
        let tail = &theta[n - (n / 3).max(1).min(n)..];
        Self {
            rmse: rmse(&theta),
            mae: mae(&theta),
            max_abs_theta: theta.iter().fold(0.0, |m, t| m.max(t.abs())),
            final_third_mean_abs_theta: mae(tail),
        }
    }

    fn named(&self) -> [(&'static str, f64); 4] {
        [
            ("rmse", self.rmse),
            ("mae", self.mae),
            ("max_abs_theta", self.max_abs_theta),
            ("final_third_mean_abs_theta", self.final_third_mean_abs_theta),
        ]
    }
}

#[derive(Debug, Clone)]
pub struct CompareOutput {
    pub a: TrajectoryMetrics,
    pub b: TrajectoryMetrics,
    pub report: PathBuf,
    pub svg: PathBuf,
}

fn load_csv(path: &Path) -> CliResult<Vec<Sample>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_trajectory(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

/// Compare two trajectory CSVs; writes a key-value report (deltas are
/// `b - a`) and an overlay plot next to it.
pub fn cmd_compare(args: &CompareArgs) -> CliResult<CompareOutput> {
    let samples_a = load_csv(&args.a)?;
    let samples_b = load_csv(&args.b)?;
    let a = TrajectoryMetrics::from_samples(&samples_a);
    let b = TrajectoryMetrics::from_samples(&samples_b);

    let report_path = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("compare.txt"));
    let svg_path = report_path.with_extension("svg");

    let mut report = String::from("# trajectory comparison (delta = b - a)\n");
    let _ = writeln!(report, "a = {}", args.a.display());
    let _ = writeln!(report, "b = {}", args.b.display());
    for ((name, va), (_, vb)) in a.named().iter().zip(b.named()) {
        let _ = writeln!(report, "{name}.a = {va}");
        let _ = writeln!(report, "{name}.b = {vb}");
        let _ = writeln!(report, "{name}.delta = {}", vb - va);
    }
    write_file(&report_path, &report)?;

    let label = |p: &Path| {
        p.file_stem()
            .map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned())
    };
    let chart = LineChart {
        title: "Rod angle comparison".into(),
        x_label: "t [s]".into(),
        y_label: "theta [rad]".into(),
        series: vec![
            Series {
                label: format!("a: {}", label(&args.a)),
                points: samples_a.iter().map(|s| (s.t, s.state.theta)).collect(),
            },
            Series {
                label: format!("b: {}", label(&args.b)),
                points: samples_b.iter().map(|s| (s.t, s.state.theta)).collect(),
            },
        ],
    };
    write_file(&svg_path, &chart.render())?;

    Ok(CompareOutput {
        a,
        b,
        report: report_path,
        svg: svg_path,
    })
}
