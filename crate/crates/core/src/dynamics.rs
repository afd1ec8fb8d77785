//! Equations of motion for a point-mass pendulum on a massless rod, hinged
//! to a cart that slides on a floor with Coulomb friction.
//!
//! The rod angle `theta` is measured from the upright position, positive
//! when the ball sits on the negative-x side of the hinge:
//! `x_m = x - L sin(theta)`, `y_m = L cos(theta)`.
//!
//! The two Euler-Lagrange equations are
//!
//! ```text
//! (M + m) x'' - m L theta'' cos(theta) + m L theta'^2 sin(theta) = F
//! -x'' cos(theta) + L theta'' - g sin(theta)                      = 0
//! ```
//!
//! and are solved as a 2x2 linear system for `(x'', theta'')`.

use crate::error::{require, Result};

/// Physical constants of the plant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Cart mass `M` in kg.
    pub cart_mass: f64,
    /// Ball mass `m` in kg.
    pub ball_mass: f64,
    /// Rod length `L` in m.
    pub rod_length: f64,
    /// Cart-floor friction coefficient `mu`.
    pub friction_coefficient: f64,
    /// Gravitational acceleration `g` in m/s^2.
    pub gravity: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            cart_mass: 5.0,
            ball_mass: 5.0,
            rod_length: 1.0,
            friction_coefficient: 0.3,
            gravity: 9.8,
        }
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        require(positive(self.cart_mass), "cart_mass", self.cart_mass, "must be > 0")?;
        require(positive(self.ball_mass), "ball_mass", self.ball_mass, "must be > 0")?;
        require(positive(self.rod_length), "rod_length", self.rod_length, "must be > 0")?;
        require(
            self.friction_coefficient.is_finite() && self.friction_coefficient >= 0.0,
            "friction_coefficient",
            self.friction_coefficient,
            "must be >= 0",
        )?;
        require(positive(self.gravity), "gravity", self.gravity, "must be > 0")
    }

    /// Magnitude of the Coulomb friction force, `mu (M + m) g`.
    pub fn friction_force(&self) -> f64 {
        self.friction_coefficient * (self.cart_mass + self.ball_mass) * self.gravity
    }
}

/// Generalized coordinates and velocities at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State {
    pub x: f64,
    pub x_dot: f64,
    /// Rod angle from upright in rad. Never wrapped.
    pub theta: f64,
    pub theta_dot: f64,
}

impl State {
    pub const fn new(x: f64, x_dot: f64, theta: f64, theta_dot: f64) -> Self {
        Self {
            x,
            x_dot,
            theta,
            theta_dot,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite()
            && self.x_dot.is_finite()
            && self.theta.is_finite()
            && self.theta_dot.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Accelerations {
    pub x_ddot: f64,
    pub theta_ddot: f64,
}

/// Below this `|cos(theta)|` the angular acceleration is recovered from the
/// rod equation instead of the cart equation.
pub const COS_SINGULARITY_THRESHOLD: f64 = 1e-8;

/// Net horizontal force on the cart after friction.
///
/// Friction switches on the sign of the *applied* force, not the cart
/// velocity: forces weaker than `mu (M + m) g` are cancelled entirely and
/// stronger ones are reduced by that amount. A coasting cart with no applied
/// force therefore feels no friction.
pub fn net_force(params: &SystemParams, applied: f64) -> f64 {
    let friction = params.friction_force();
    if friction.abs() > applied.abs() {
        0.0
    } else if applied > 0.0 {
        applied - friction
    } else {
        applied + friction
    }
}

/// Cart and rod accelerations for an applied (pre-friction) force.
pub fn accelerations(params: &SystemParams, state: &State, applied: f64) -> Accelerations {
    let force = net_force(params, applied);
    let (sin, cos) = state.theta.sin_cos();
    let m = params.ball_mass;
    let len = params.rod_length;

    // a*x'' + b*theta'' + c = 0
    // d*x'' + e*theta'' + f = 0
    let a = params.cart_mass + m;
    let b = -m * len * cos;
    let c = m * len * state.theta_dot * state.theta_dot * sin - force;
    let d = -cos;
    let e = len;
    let f = -params.gravity * sin;

    // a*e - d*b = L (M + m sin^2) >= L M > 0
    let x_ddot = (f * b - c * e) / (a * e - d * b);
    let theta_ddot = if cos.abs() > COS_SINGULARITY_THRESHOLD {
        -(c + a * x_ddot) / b
    } else {
        -(f + d * x_ddot) / e
    };
    Accelerations { x_ddot, theta_ddot }
}

/// Ball position `(x_m, y_m)`.
pub fn ball_position(params: &SystemParams, state: &State) -> (f64, f64) {
    let (sin, cos) = state.theta.sin_cos();
    (state.x - params.rod_length * sin, params.rod_length * cos)
}

/// Ball velocity `(x_m', y_m')`.
pub fn ball_velocity(params: &SystemParams, state: &State) -> (f64, f64) {
    let (sin, cos) = state.theta.sin_cos();
    let len = params.rod_length;
    (
        state.x_dot - len * state.theta_dot * cos,
        -len * state.theta_dot * sin,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Energies {
    pub kinetic: f64,
    pub potential: f64,
    /// `kinetic - potential`.
    pub lagrangian: f64,
}

impl Energies {
    pub fn total(&self) -> f64 {
        self.kinetic + self.potential
    }
}

/// Kinetic, potential and Lagrangian of the system. Potential energy is
/// zero at the hinge height.
pub fn energies(params: &SystemParams, state: &State) -> Energies {
    let big_m = params.cart_mass;
    let m = params.ball_mass;
    let len = params.rod_length;
    let (xd, td) = (state.x_dot, state.theta_dot);
    let cos = state.theta.cos();

    let kinetic = 0.5 * big_m * xd * xd + 0.5 * m * xd * xd - m * xd * len * td * cos
        + 0.5 * m * len * len * td * td;
    let potential = m * params.gravity * len * cos;
    Energies {
        kinetic,
        potential,
        lagrangian: kinetic - potential,
    }
}
