// SPDX-License-Identifier: MIT OR Apache-2.0

//! Quantile (pinball) loss and its subgradient.

use crate::error::{Error, Result};

fn check_level(tau: f64) -> Result<()> {
    if tau > 0.0 && tau < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidLevel(tau))
    }
}

/// `tau * |z|` for `z > 0`, `(1 - tau) * |z|` otherwise.
pub fn pinball_loss(z: f64, tau: f64) -> Result<f64> {
    check_level(tau)?;
    Ok(if z > 0.0 { tau * z } else { (tau - 1.0) * z })
}

/// Subgradient of [`pinball_loss`] in `z`.
///
/// At `z = 0` this returns `tau - 1`, so that with `tau = 1 - alpha` and
/// `z = s - q` the subgradient equals `err - alpha` with `err = 1{s > q}`.
pub fn pinball_subgradient(z: f64, tau: f64) -> Result<f64> {
    check_level(tau)?;
    Ok(if z > 0.0 { tau } else { tau - 1.0 })
}
