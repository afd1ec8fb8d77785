//! Named scenarios with the reference gains and start angles pre-filled.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_6};
use std::fmt;
use std::str::FromStr;

use crate::control::PidGains;
use crate::objective::Metric;

/// Seed used for the optimization scenarios.
pub const TUNING_SEED: PidGains = PidGains::new(-300.0, 0.0, -100.0);
/// Reference RMSE-tuned gains.
pub const RMSE_OPTIMUM: PidGains = PidGains::new(-308.08, -63.55, -94.96);
/// Reference MAE-tuned gains.
pub const MAE_OPTIMUM: PidGains = PidGains::new(-289.57, -77.18, -60.65);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// P only; sustained oscillation.
    Fig2,
    /// PD; little oscillation, steady-state offset.
    Fig3,
    /// Manually tuned PID.
    Fig4,
    /// RMSE-optimized gains.
    Fig5,
    /// RMSE-optimized gains from a pi/6 start.
    Fig6,
    /// MAE-optimized gains.
    Fig7,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::Fig2,
        Scenario::Fig3,
        Scenario::Fig4,
        Scenario::Fig5,
        Scenario::Fig6,
        Scenario::Fig7,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Fig2 => "fig2",
            Scenario::Fig3 => "fig3",
            Scenario::Fig4 => "fig4",
            Scenario::Fig5 => "fig5",
            Scenario::Fig6 => "fig6",
            Scenario::Fig7 => "fig7",
        }
    }

    pub fn gains(self) -> PidGains {
        match self {
            Scenario::Fig2 => PidGains::new(-200.0, 0.0, 0.0),
            Scenario::Fig3 => PidGains::new(-200.0, 0.0, -100.0),
            Scenario::Fig4 => PidGains::new(-200.0, -20.0, -100.0),
            Scenario::Fig5 | Scenario::Fig6 => RMSE_OPTIMUM,
            Scenario::Fig7 => MAE_OPTIMUM,
        }
    }

    pub fn theta0(self) -> f64 {
        match self {
            Scenario::Fig6 => FRAC_PI_6,
            _ => FRAC_PI_4,
        }
    }

    pub fn metric(self) -> Metric {
        match self {
            Scenario::Fig7 => Metric::Mae,
            _ => Metric::Rmse,
        }
    }

    /// Starting point for `tune`: the optimization scenarios start from the
    /// standard seed, the manual ones from their own gains.
    pub fn tune_seed(self) -> PidGains {
        match self {
            Scenario::Fig5 | Scenario::Fig6 | Scenario::Fig7 => TUNING_SEED,
            manual => manual.gains(),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                let names: Vec<_> = Scenario::ALL.iter().map(|s| s.name()).collect();
                format!("unknown scenario `{s}` (expected one of {})", names.join(", "))
            })
    }
}
