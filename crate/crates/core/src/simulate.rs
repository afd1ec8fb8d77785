//! Fixed-step closed-loop simulation.
//!
//! Each update reads the current angle, asks the controller for a command,
//! holds that command for the whole step and advances the state with the
//! constant-acceleration kinematics
//!
//! ```text
//! q' = q + q_dot dt + 0.5 q_ddot dt^2
//! q_dot' = q_dot + q_ddot dt
//! ```
//!
//! for both `x` and `theta`.

use crate::control::{PidController, PidGains, DEFAULT_SATURATION};
use crate::dynamics::{accelerations, net_force, State, SystemParams};
use crate::error::{require, Error, Result};

/// Fixed update interval in s.
pub const DEFAULT_DT: f64 = 0.001;
/// Run length in s.
pub const DEFAULT_DURATION: f64 = 15.0;

/// How the controller's derivative memory is set before the first update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DerivativeStart {
    /// The first update reports a zero derivative.
    Zero,
    /// The rod is taken to have been at the target before release, so the
    /// first update differentiates the initial error against zero.
    #[default]
    FromTarget,
}

/// Gains, set point and actuator limits used to build the controller of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerSetup {
    pub gains: PidGains,
    pub target_angle: f64,
    pub saturation_low: f64,
    pub saturation_high: f64,
    pub derivative_start: DerivativeStart,
}

impl ControllerSetup {
    pub fn new(gains: PidGains) -> Self {
        Self {
            gains,
            target_angle: 0.0,
            saturation_low: -DEFAULT_SATURATION,
            saturation_high: DEFAULT_SATURATION,
            derivative_start: DerivativeStart::default(),
        }
    }

    pub fn build(&self) -> Result<PidController> {
        let mut pid = PidController::new(self.gains)
            .with_target(self.target_angle)
            .with_bounds(self.saturation_low, self.saturation_high)?;
        if self.derivative_start == DerivativeStart::FromTarget {
            pid.prime(self.target_angle);
        }
        Ok(pid)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub params: SystemParams,
    pub initial_state: State,
    pub dt: f64,
    pub duration: f64,
    pub controller: ControllerSetup,
}

impl SimConfig {
    /// Default plant, rod released at pi/4 from a cart at rest at the origin,
    /// 15 s at 1 ms.
    pub fn new(gains: PidGains) -> Self {
        Self {
            params: SystemParams::default(),
            initial_state: State::new(0.0, 0.0, std::f64::consts::FRAC_PI_4, 0.0),
            dt: DEFAULT_DT,
            duration: DEFAULT_DURATION,
            controller: ControllerSetup::new(gains),
        }
    }

    pub fn with_theta0(mut self, theta: f64) -> Self {
        self.initial_state.theta = theta;
        self
    }

    pub fn with_gains(mut self, gains: PidGains) -> Self {
        self.controller.gains = gains;
        self
    }

    /// Validates the configuration and returns the number of updates.
    pub fn step_count(&self) -> Result<usize> {
        self.params.validate()?;
        require(self.dt.is_finite() && self.dt > 0.0, "dt", self.dt, "must be > 0")?;
        require(
            self.duration.is_finite() && self.duration > 0.0,
            "duration",
            self.duration,
            "must be > 0",
        )?;
        require(
            self.initial_state.is_finite(),
            "initial_state",
            f64::NAN,
            "must be finite",
        )?;
        let g = self.controller.gains;
        require(g.kp.is_finite(), "k_p", g.kp, "must be finite")?;
        require(g.ki.is_finite(), "k_i", g.ki, "must be finite")?;
        require(g.kd.is_finite(), "k_d", g.kd, "must be finite")?;
        require(
            self.controller.target_angle.is_finite(),
            "target_angle",
            self.controller.target_angle,
            "must be finite",
        )?;
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // also rejects NaN
        if !(self.controller.saturation_low < self.controller.saturation_high) {
            return Err(Error::InvalidBounds {
                low: self.controller.saturation_low,
                high: self.controller.saturation_high,
            });
        }

        let ratio = self.duration / self.dt;
        let steps = ratio.round();
        // A few ulps of slack so that e.g. 0.3 / 0.1 is accepted as 3 steps.
        if steps < 1.0 || (ratio - steps).abs() > 1e-12 * steps {
            return Err(Error::FractionalSteps {
                duration: self.duration,
                dt: self.dt,
            });
        }
        Ok(steps as usize)
    }
}

/// State after one update, with the command and net force that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub state: State,
    pub command: f64,
    pub net_force: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    /// Index of the update that produced a non-finite state. The offending
    /// sample is recorded and the run stops there.
    pub diverged_at: Option<usize>,
}

impl Trajectory {
    pub fn diverged(&self) -> bool {
        self.diverged_at.is_some()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn thetas(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.state.theta)
    }

    /// Samples with `t > from`.
    pub fn after(&self, from: f64) -> &[Sample] {
        let start = self.samples.partition_point(|s| s.t <= from);
        &self.samples[start..]
    }
}

/// Advance one fixed step with a held command.
pub fn step(params: &SystemParams, state: &State, command: f64, dt: f64) -> State {
    let acc = accelerations(params, state, command);
    let half_dt2 = 0.5 * dt * dt;
    State {
        x: state.x + state.x_dot * dt + acc.x_ddot * half_dt2,
        x_dot: state.x_dot + acc.x_ddot * dt,
        theta: state.theta + state.theta_dot * dt + acc.theta_ddot * half_dt2,
        theta_dot: state.theta_dot + acc.theta_ddot * dt,
    }
}

/// Run a closed-loop simulation with a freshly built controller.
pub fn run(config: &SimConfig) -> Result<Trajectory> {
    let steps = config.step_count()?;
    let mut controller = config.controller.build()?;
    let params = &config.params;
    let dt = config.dt;

    let mut samples = Vec::with_capacity(steps);
    let mut state = config.initial_state;
    let mut diverged_at = None;
    for k in 0..steps {
        let command = controller.update(state.theta, dt)?;
        state = step(params, &state, command, dt);
        samples.push(Sample {
            t: (k + 1) as f64 * dt,
            state,
            command,
            net_force: net_force(params, command),
        });
        if !state.is_finite() {
            diverged_at = Some(k);
            break;
        }
    }
    Ok(Trajectory {
        samples,
        diverged_at,
    })
}
