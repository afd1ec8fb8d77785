//! Simulation and PID gain tuning for an inverted pendulum on a cart.
//!
//! The plant is a point mass on a massless rod hinged to a cart with
//! Coulomb friction against the floor. [`simulate::run`] closes the loop
//! with a saturated [`control::PidController`] on the rod angle,
//! [`objective::ObjectiveSpec`] scores a gain triple by the RMSE or MAE of
//! the angle error plus a gain-magnitude penalty, and
//! [`optimizer::minimize`] searches gain space with Nelder-Mead.

pub mod cli;
pub mod control;
pub mod dynamics;
pub mod error;
pub mod objective;
pub mod optimizer;
pub mod simulate;

pub use control::{PidController, PidGains};
pub use dynamics::{Accelerations, State, SystemParams};
pub use error::{Error, Result};
pub use objective::{Metric, ObjectiveSpec};
pub use optimizer::{minimize, tune, OptimizerConfig, TuneResult};
pub use simulate::{run, SimConfig, Trajectory};
