//! Flat `key = value` configuration.
//!
//! Lines are `key = value`; `#` starts a comment. Angles may be written as
//! multiples of pi (`pi/4`, `-pi/6`, `0.5*pi`). A `scenario = name` line
//! applies that scenario's presets at the point where it appears, so later
//! lines override it.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, FRAC_PI_8, PI};

use crate::control::PidGains;
use crate::objective::{Metric, ObjectiveSpec, DEFAULT_DIVERGENCE_PENALTY, DEFAULT_GAIN_PENALTY};
use crate::optimizer::OptimizerConfig;
use crate::simulate::{DerivativeStart, SimConfig};

use super::scenario::Scenario;
use super::{CliError, CliResult};

/// Keys written into manifests and reports that carry no configuration.
const INFORMATIONAL_KEYS: &[&str] = &[
    "version",
    "command",
    "samples",
    "diverged",
    "diverged_at",
    "csv",
    "svg",
    "manifest",
];

/// Everything a `simulate` or `tune` invocation needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Option<Scenario>,
    pub sim: SimConfig,
    pub metric: Metric,
    pub gain_penalty_weight: f64,
    pub divergence_penalty: f64,
    pub seed: PidGains,
    pub max_evaluations: usize,
    pub simplex_scale: f64,
    pub tolerance: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let opt = OptimizerConfig::new(PidGains::default());
        Self {
            scenario: None,
            sim: SimConfig::new(PidGains::default()),
            metric: Metric::Rmse,
            gain_penalty_weight: DEFAULT_GAIN_PENALTY,
            divergence_penalty: DEFAULT_DIVERGENCE_PENALTY,
            seed: PidGains::new(-300.0, 0.0, -100.0),
            max_evaluations: opt.max_evaluations,
            simplex_scale: opt.simplex_scale,
            tolerance: opt.tolerance,
        }
    }
}

impl RunConfig {
    pub fn apply_scenario(&mut self, scenario: Scenario) {
        self.scenario = Some(scenario);
        self.sim.controller.gains = scenario.gains();
        self.sim.initial_state.theta = scenario.theta0();
        self.metric = scenario.metric();
        self.seed = scenario.tune_seed();
    }

    /// Apply every `key = value` line of `text`.
    pub fn apply_text(&mut self, text: &str) -> CliResult<()> {
        for (index, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::usage(format!("line {}: expected `key = value`", index + 1))
            })?;
            self.set(key.trim(), value.trim())
                .map_err(|msg| CliError::usage(format!("line {}: {msg}", index + 1)))?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let num = || parse_number(value).map_err(|e| format!("`{key}`: {e}"));
        let sim = &mut self.sim;
        match key {
            "scenario" => self.apply_scenario(value.parse()?),
            "cart_mass" => sim.params.cart_mass = num()?,
            "ball_mass" => sim.params.ball_mass = num()?,
            "rod_length" => sim.params.rod_length = num()?,
            "friction_coefficient" => sim.params.friction_coefficient = num()?,
            "gravity" => sim.params.gravity = num()?,
            "x0" => sim.initial_state.x = num()?,
            "x_dot0" => sim.initial_state.x_dot = num()?,
            "theta0" => sim.initial_state.theta = num()?,
            "theta_dot0" => sim.initial_state.theta_dot = num()?,
            "dt" => sim.dt = num()?,
            "duration" => sim.duration = num()?,
            "k_p" => sim.controller.gains.kp = num()?,
            "k_i" => sim.controller.gains.ki = num()?,
            "k_d" => sim.controller.gains.kd = num()?,
            "target_angle" => sim.controller.target_angle = num()?,
            "saturation_low" => sim.controller.saturation_low = num()?,
            "saturation_high" => sim.controller.saturation_high = num()?,
            "derivative_start" => {
                sim.controller.derivative_start = match value {
                    "zero" => DerivativeStart::Zero,
                    "target" => DerivativeStart::FromTarget,
                    other => {
                        return Err(format!(
                            "`derivative_start`: unknown value `{other}` (expected zero or target)"
                        ))
                    }
                }
            }
            "metric" => self.metric = value.parse()?,
            "gain_penalty_weight" => self.gain_penalty_weight = num()?,
            "divergence_penalty" => self.divergence_penalty = num()?,
            "seed" => self.seed = parse_gains(value)?,
            "max_evaluations" => {
                self.max_evaluations = value
                    .parse()
                    .map_err(|_| format!("`max_evaluations`: `{value}` is not a count"))?
            }
            "simplex_scale" => self.simplex_scale = num()?,
            "tolerance" => self.tolerance = num()?,
            k if INFORMATIONAL_KEYS.contains(&k) => {}
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    pub fn objective_spec(&self) -> ObjectiveSpec {
        ObjectiveSpec {
            metric: self.metric,
            gain_penalty_weight: self.gain_penalty_weight,
            sim: self.sim,
            divergence_penalty: self.divergence_penalty,
        }
    }

    pub fn optimizer_config(&self) -> OptimizerConfig {
        let mut cfg = OptimizerConfig::new(self.seed);
        cfg.max_evaluations = self.max_evaluations;
        cfg.simplex_scale = self.simplex_scale;
        cfg.tolerance = self.tolerance;
        cfg
    }

    /// Every configuration key with its resolved value, in an order that
    /// [`apply_text`](Self::apply_text) reproduces exactly.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let s = &self.sim;
        let c = &s.controller;
        let mut out = Vec::new();
        if let Some(scenario) = self.scenario {
            out.push(("scenario", scenario.name().to_string()));
        }
        let nums = [
            ("cart_mass", s.params.cart_mass),
            ("ball_mass", s.params.ball_mass),
            ("rod_length", s.params.rod_length),
            ("friction_coefficient", s.params.friction_coefficient),
            ("gravity", s.params.gravity),
            ("x0", s.initial_state.x),
            ("x_dot0", s.initial_state.x_dot),
            ("theta0", s.initial_state.theta),
            ("theta_dot0", s.initial_state.theta_dot),
            ("dt", s.dt),
            ("duration", s.duration),
            ("k_p", c.gains.kp),
            ("k_i", c.gains.ki),
            ("k_d", c.gains.kd),
            ("target_angle", c.target_angle),
            ("saturation_low", c.saturation_low),
            ("saturation_high", c.saturation_high),
        ];
        out.extend(nums.iter().map(|&(k, v)| (k, format!("{v}"))));
        out.push((
            "derivative_start",
            match c.derivative_start {
                DerivativeStart::Zero => "zero",
                DerivativeStart::FromTarget => "target",
            }
            .to_string(),
        ));
        out.push(("metric", self.metric.to_string()));
        out.push(("gain_penalty_weight", format!("{}", self.gain_penalty_weight)));
        out.push(("divergence_penalty", format!("{}", self.divergence_penalty)));
        out.push(("seed", format_gains(self.seed)));
        out.push(("max_evaluations", self.max_evaluations.to_string()));
        out.push(("simplex_scale", format!("{}", self.simplex_scale)));
        out.push(("tolerance", format!("{}", self.tolerance)));
        out
    }
}

/// A decimal number or a multiple of pi: `pi`, `-pi/4`, `2*pi/3`, `0.5pi`.
pub fn parse_number(text: &str) -> Result<f64, String> {
    let text = text.trim();
    if let Ok(v) = text.parse::<f64>() {
        return Ok(v);
    }
    let bad = || format!("`{text}` is not a number");
    let lower = text.to_ascii_lowercase();
    let (sign, body) = match lower.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, lower.strip_prefix('+').unwrap_or(&lower)),
    };
    let at = body.find("pi").ok_or_else(bad)?;
    let (before, after) = (&body[..at], &body[at + 2..]);
    let factor = match before.trim().trim_end_matches('*').trim() {
        "" => 1.0,
        f => f.parse::<f64>().map_err(|_| bad())?,
    };
    let divisor = match after.trim() {
        "" => 1.0,
        rest => rest
            .strip_prefix('/')
            .ok_or_else(bad)?
            .trim()
            .parse::<f64>()
            .map_err(|_| bad())?,
    };
    // exact constants so that `pi/6` equals FRAC_PI_6 bit for bit
    let base = match divisor {
        1.0 => PI,
        2.0 => FRAC_PI_2,
        3.0 => FRAC_PI_3,
        4.0 => FRAC_PI_4,
        6.0 => FRAC_PI_6,
        8.0 => FRAC_PI_8,
        d => PI / d,
    };
    Ok(sign * factor * base)
}

/// `kp,ki,kd`.
pub fn parse_gains(text: &str) -> Result<PidGains, String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(format!(
            "expected three comma-separated gains `k_p,k_i,k_d`, got {} in `{text}`",
            parts.len()
        ));
    }
    let mut g = [0.0; 3];
    for (slot, part) in g.iter_mut().zip(&parts) {
        *slot = parse_number(part)?;
    }
    Ok(PidGains::from(g))
}

pub fn format_gains(g: PidGains) -> String {
    format!("{},{},{}", g.kp, g.ki, g.kd)
}
