//! Discrete PID controller on the rod angle with a clamped output.

use crate::error::{require, Error, Result};

/// Default actuator limit in N.
pub const DEFAULT_SATURATION: f64 = 500.0;

/// Gain triple. Stabilizing gains for this plant are negative: a positive
/// angle error must push the cart in the negative direction.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
}

impl PidGains {
    pub const fn new(kp: f64, ki: f64, kd: f64) -> Self {
        Self { kp, ki, kd }
    }

    pub fn abs_sum(&self) -> f64 {
        self.kp.abs() + self.ki.abs() + self.kd.abs()
    }

    pub fn is_finite(&self) -> bool {
        self.kp.is_finite() && self.ki.is_finite() && self.kd.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.kp, self.ki, self.kd]
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self::new(self.kp * factor, self.ki * factor, self.kd * factor)
    }
}

impl From<[f64; 3]> for PidGains {
    fn from([kp, ki, kd]: [f64; 3]) -> Self {
        Self { kp, ki, kd }
    }
}

/// PID on `e = measured - target`.
///
/// The integral accumulates `e * dt` before the output is formed and keeps
/// accumulating while the output is clamped (no anti-windup). The derivative
/// is a backward difference and is zero on the first update after
/// construction or [`reset`](Self::reset).
#[derive(Debug, Clone, PartialEq)]
pub struct PidController {
    gains: PidGains,
    target: f64,
    low: f64,
    high: f64,
    integral: f64,
    previous_error: f64,
    initialized: bool,
}

impl PidController {
    /// Target 0 and output limited to `[-500, 500]`.
    pub fn new(gains: PidGains) -> Self {
        Self {
            gains,
            target: 0.0,
            low: -DEFAULT_SATURATION,
            high: DEFAULT_SATURATION,
            integral: 0.0,
            previous_error: 0.0,
            initialized: false,
        }
    }

    pub fn with_target(mut self, target: f64) -> Self {
        self.target = target;
        self
    }

    pub fn with_bounds(mut self, low: f64, high: f64) -> Result<Self> {
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // also rejects NaN
        if !(low < high) {
            return Err(Error::InvalidBounds { low, high });
        }
        self.low = low;
        self.high = high;
        Ok(self)
    }

    pub fn gains(&self) -> PidGains {
        self.gains
    }

    pub fn target(&self) -> f64 {
        self.target
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.low, self.high)
    }

    pub fn integral(&self) -> f64 {
        self.integral
    }

    pub fn is_initialized(&self) -> bool {
        self.initialized
    }

    /// Seed the derivative memory as if a previous update had seen
    /// `measured`, so the next update differentiates against it.
    pub fn prime(&mut self, measured: f64) {
        self.previous_error = measured - self.target;
        self.initialized = true;
    }

    pub fn reset(&mut self) {
        self.integral = 0.0;
        self.previous_error = 0.0;
        self.initialized = false;
    }

    /// Advance by `dt` seconds with a new angle measurement and return the
    /// clamped command in N.
    pub fn update(&mut self, measured: f64, dt: f64) -> Result<f64> {
        require(dt > 0.0 && dt.is_finite(), "dt", dt, "must be > 0")?;
        let error = measured - self.target;
        self.integral += error * dt;
        let derivative = if self.initialized {
            (error - self.previous_error) / dt
        } else {
            0.0
        };
        self.previous_error = error;
        self.initialized = true;

        let raw = self.gains.kp * error + self.gains.ki * self.integral + self.gains.kd * derivative;
        Ok(raw.clamp(self.low, self.high))
    }
}
