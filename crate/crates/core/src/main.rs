use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cartpole_pid::cli::{cmd_compare, cmd_simulate, cmd_tune, CompareArgs, RunArgs};

#[derive(Parser)]
#[command(name = "cartpole", version, about = "Inverted pendulum on a cart with PID control and gain tuning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one closed-loop simulation and write CSV, manifest and SVG.
    Simulate(RunFlags),
    /// Tune the gains with Nelder-Mead and write the report and tuned run.
    Tune(RunFlags),
    /// Compare two trajectory CSVs.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Report path; the overlay plot goes next to it as .svg.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunFlags {
    /// `key = value` configuration file (a manifest works too).
    #[arg(long)]
    config: Option<PathBuf>,
    /// fig2 .. fig7
    #[arg(long)]
    scenario: Option<String>,
    /// rmse or mae
    #[arg(long)]
    metric: Option<String>,
    /// Initial gains for tuning, `k_p,k_i,k_d`.
    #[arg(long, allow_hyphen_values = true)]
    seed: Option<String>,
    /// Initial rod angle in rad; accepts forms like `pi/6`. For `tune` it
    /// only affects the emitted tuned run.
    #[arg(long, allow_hyphen_values = true)]
    theta0: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    duration: Option<String>,
    /// CSV path for `simulate`, output directory for `tune`.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl From<RunFlags> for RunArgs {
    fn from(f: RunFlags) -> Self {
        RunArgs {
            config: f.config,
            scenario: f.scenario,
            metric: f.metric,
            seed: f.seed,
            theta0: f.theta0,
            dt: f.dt,
            duration: f.duration,
            out: f.out,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };

    let outcome = match cli.command {
        Command::Simulate(flags) => cmd_simulate(&flags.into()).map(|o| {
            println!(
                "wrote {} ({} samples), {}, {}",
                o.csv.display(),
                o.trajectory.len(),
                o.manifest.display(),
                o.svg.display()
            );
        }),
        Command::Tune(flags) => cmd_tune(&flags.into()).map(|o| {
            let g = o.result.best_gains;
            println!(
                "best gains ({}, {}, {}) cost {} after {} evaluations (seed cost {})",
                g.kp, g.ki, g.kd, o.result.best_cost, o.result.evaluation_count, o.result.initial_cost
            );
            println!("wrote {} and {}", o.report.display(), o.tuned.csv.display());
        }),
        Command::Compare { a, b, out } => cmd_compare(&CompareArgs { a, b, out }).map(|o| {
            println!("wrote {} and {}", o.report.display(), o.svg.display());
        }),
    };

    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
