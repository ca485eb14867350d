// SPDX-License-Identifier: MIT OR Apache-2.0

//! Online controllers that set the conformal quantile.

pub mod aci;
pub mod heuristics;
pub mod integrator;
pub mod kernel;
pub mod saturation;
pub mod tracker;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use aci::{beta_t, empirical_quantile, AciController};
pub use heuristics::{csat_heuristic, rate_heuristics, RateHeuristic};
pub use integrator::ErrorIntegrator;
pub use kernel::{KernelIntegrator, KernelSpec, Observation};
pub use saturation::{log_clamp, Saturation};
pub use tracker::QuantileTracker;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerMode {
    /// Quantile tracking.
    P,
    /// Saturated error integration.
    Pi,
    /// Error integration plus a scorecast.
    Pid,
    Aci,
    AciClipped,
    /// Error integration on a bounded loss instead of the miscoverage indicator.
    Risk,
    KernelPi,
}

impl ControllerMode {
    pub const ALL: [ControllerMode; 7] = [
        ControllerMode::P,
        ControllerMode::Pi,
        ControllerMode::Pid,
        ControllerMode::Aci,
        ControllerMode::AciClipped,
        ControllerMode::Risk,
        ControllerMode::KernelPi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ControllerMode::P => "p",
            ControllerMode::Pi => "pi",
            ControllerMode::Pid => "pid",
            ControllerMode::Aci => "aci",
            ControllerMode::AciClipped => "aci_clipped",
            ControllerMode::Risk => "risk",
            ControllerMode::KernelPi => "kernel_pi",
        }
    }

    pub fn uses_saturation(self) -> bool {
        matches!(
            self,
            ControllerMode::Pi | ControllerMode::Pid | ControllerMode::Risk | ControllerMode::KernelPi
        )
    }

    pub fn is_aci(self) -> bool {
        matches!(self, ControllerMode::Aci | ControllerMode::AciClipped)
    }
}

impl fmt::Display for ControllerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ControllerMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        ControllerMode::ALL
            .into_iter()
            .find(|m| m.name() == key)
            .ok_or_else(|| format!("unknown controller `{s}`"))
    }
}
