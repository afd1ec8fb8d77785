//! Scoring a gain triple: simulate, take the angle error of every recorded
//! update, reduce it with RMSE or MAE and add a small penalty proportional
//! to `|K_p| + |K_i| + |K_d|`.

use std::fmt;
use std::str::FromStr;

use crate::control::PidGains;
use crate::error::{require, Result};
use crate::simulate::{run, SimConfig, Trajectory};

pub const DEFAULT_GAIN_PENALTY: f64 = 1e-4;
pub const DEFAULT_DIVERGENCE_PENALTY: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    Rmse,
    Mae,
}

impl Metric {
    pub fn apply(self, errors: &[f64]) -> f64 {
        match self {
            Metric::Rmse => rmse(errors),
            Metric::Mae => mae(errors),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Rmse => "rmse",
            Metric::Mae => "mae",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rmse" => Ok(Metric::Rmse),
            "mae" => Ok(Metric::Mae),
            other => Err(format!("unknown metric `{other}` (expected rmse or mae)")),
        }
    }
}

/// Root mean square; 0 for an empty series.
pub fn rmse(errors: &[f64]) -> f64 {
    if errors.is_empty() {
        return 0.0;
    }
    (errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64).sqrt()
}

/// Mean absolute value; 0 for an empty series.
pub fn mae(errors: &[f64]) -> f64 {
    if errors.is_empty() {
        return 0.0;
    }
    errors.iter().map(|e| e.abs()).sum::<f64>() / errors.len() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveSpec {
    pub metric: Metric,
    pub gain_penalty_weight: f64,
    /// Simulation setup; its gains are replaced by the candidate's.
    pub sim: SimConfig,
    /// Cost assigned to a run that produced a non-finite state.
    pub divergence_penalty: f64,
}

impl ObjectiveSpec {
    pub fn new(metric: Metric) -> Self {
        Self {
            metric,
            gain_penalty_weight: DEFAULT_GAIN_PENALTY,
            sim: SimConfig::new(PidGains::default()),
            divergence_penalty: DEFAULT_DIVERGENCE_PENALTY,
        }
    }

    pub fn validate(&self) -> Result<()> {
        require(
            self.gain_penalty_weight.is_finite() && self.gain_penalty_weight >= 0.0,
            "gain_penalty_weight",
            self.gain_penalty_weight,
            "must be >= 0",
        )?;
        require(
            self.divergence_penalty.is_finite() && self.divergence_penalty > 0.0,
            "divergence_penalty",
            self.divergence_penalty,
            "must be > 0",
        )?;
        self.sim.step_count().map(|_| ())
    }

    pub fn evaluate(&self, gains: PidGains) -> Result<f64> {
        self.evaluate_detailed(gains).map(|e| e.cost)
    }

    /// Full breakdown of one evaluation, including the trajectory.
    pub fn evaluate_detailed(&self, gains: PidGains) -> Result<Evaluation> {
        self.validate()?;
        let trajectory = run(&self.sim.with_gains(gains))?;
        let penalty_term = self.gain_penalty_weight * gains.abs_sum();
        let (error_term, base) = if trajectory.diverged() {
            (f64::NAN, self.divergence_penalty)
        } else {
            let errors = angle_errors(&trajectory, self.sim.controller.target_angle);
            let term = self.metric.apply(&errors);
            (term, term)
        };
        let mut cost = base + penalty_term;
        if !cost.is_finite() {
            // gains so large the penalty itself overflows
            cost = f64::MAX;
        }
        Ok(Evaluation {
            cost,
            error_term,
            penalty_term,
            trajectory,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub cost: f64,
    /// Metric value of the angle error; NaN when the run diverged.
    pub error_term: f64,
    pub penalty_term: f64,
    pub trajectory: Trajectory,
}

/// `theta - target` for every recorded update.
pub fn angle_errors(trajectory: &Trajectory, target: f64) -> Vec<f64> {
    trajectory.thetas().map(|t| t - target).collect()
}
