// SPDX-License-Identifier: MIT OR Apache-2.0

//! Starting values for the learning rate and the tan integrator constants.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::ledger::ScoreWindow;

/// `C_sat = (2/pi) (ceil(delta ln T) - 1/ln T)`, which places the tan
/// asymptote so that coverage is within `delta` of target by the horizon `T`.
pub fn csat_heuristic(horizon: f64, delta: f64) -> Result<f64> {
    if !(horizon >= 3.0 && horizon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "C_sat horizon must be at least 3, got {horizon}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "coverage slack must lie in (0, 1), got {delta}"
        )));
    }
    let log_t = horizon.ln();
    let c = 2.0 / PI * (ceil_snapped(log_t * delta) - 1.0 / log_t);
    if c > 0.0 {
        Ok(c)
    } else {
        Err(Error::InvalidParameter(format!(
            "C_sat heuristic is nonpositive ({c}) for horizon {horizon}, delta {delta}"
        )))
    }
}

// A product that should be an integer can land one ulp above it.
fn ceil_snapped(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 4.0 * f64::EPSILON * r.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateHeuristic {
    pub eta: f64,
    pub k_i: f64,
    /// The trailing max was not positive and both values fell back to 1.
    pub degenerate: bool,
}

/// `eta = multiplier * B_t` and `K_I = B_t`, where `B_t` is the trailing max.
pub fn rate_heuristics(window: &ScoreWindow, multiplier: f64) -> Result<RateHeuristic> {
    if !(multiplier > 0.0 && multiplier.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "rate multiplier must be positive, got {multiplier}"
        )));
    }
    let b = window.trailing_max()?;
    if b > 0.0 && b.is_finite() {
        Ok(RateHeuristic {
            eta: multiplier * b,
            k_i: b,
            degenerate: false,
        })
    } else {
        log::warn!("trailing score max is {b}; falling back to unit learning rate");
        Ok(RateHeuristic {
            eta: 1.0,
            k_i: 1.0,
            degenerate: true,
        })
    }
}
