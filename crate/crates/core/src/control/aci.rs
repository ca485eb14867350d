// SPDX-License-Identifier: MIT OR Apache-2.0

//! Adaptive conformal inference and its clipped variant.
//!
//! ACI keeps a working level `alpha_t` and reads the empirical `1 - alpha_t`
//! quantile of all past scores. The state stores `level = 1 - alpha_t` and
//! updates it as `level += eta (err - alpha)`, the same arithmetic as the
//! quantile tracker, so ACI is literally the tracker applied to the secondary
//! score [`beta_t`].
//!
//! Empirical quantile convention: with `n` sorted scores and level `b`, let
//! `m*` be the largest `m` in `0..=n` with `m / n <= b`. The quantile is the
//! `(m* + 1)`-th order statistic, `+inf` when `m* = n`, and `-inf` when no
//! such `m` exists (`b < 0`). Under this convention `s <= Q_b` holds exactly
//! when `beta_t(s) <= b` for any score not tied with the history.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ledger::CoverageLedger;

/// Fraction of `history` at or below `score`.
pub fn beta_t(history: &[f64], score: f64) -> Result<f64> {
    if history.is_empty() {
        return Err(Error::EmptyHistory("beta_t"));
    }
    let covered = history.iter().filter(|&&h| h <= score).count();
    Ok(covered as f64 / history.len() as f64)
}

/// Largest `m` in `0..=n` with `m / n <= level`, or `None` if `level < 0`.
fn order_index(n: usize, level: f64) -> Option<usize> {
    let nf = n as f64;
    if !(level >= 0.0) {
        return None;
    }
    let mut m = ((level * nf).floor().max(0.0) as usize).min(n);
    while m < n && ((m + 1) as f64 / nf) <= level {
        m += 1;
    }
    loop {
        if (m as f64 / nf) <= level {
            return Some(m);
        }
        if m == 0 {
            return None;
        }
        m -= 1;
    }
}

/// Empirical quantile of an ascending slice under the module's convention.
pub fn empirical_quantile(sorted: &[f64], level: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::EmptyHistory("empirical_quantile"));
    }
    Ok(match order_index(sorted.len(), level) {
        None => f64::NEG_INFINITY,
        Some(m) if m == sorted.len() => f64::INFINITY,
        Some(m) => sorted[m],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AciController {
    level: f64,
    eta: f64,
    clipped: bool,
    ledger: CoverageLedger,
    sorted: Vec<f64>,
}

impl AciController {
    /// `calibration` seeds the score history and must be nonempty.
    pub fn new(alpha: f64, eta: f64, calibration: &[f64], clipped: bool) -> Result<Self> {
        if calibration.is_empty() {
            return Err(Error::EmptyHistory("ACI"));
        }
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(Error::InvalidParameter(format!("ACI rate must be nonnegative, got {eta}")));
        }
        let mut sorted = calibration.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self {
            level: 1.0 - alpha,
            eta,
            clipped,
            ledger: CoverageLedger::new(alpha)?,
            sorted,
        })
    }

    pub fn plain(alpha: f64, eta: f64, calibration: &[f64]) -> Result<Self> {
        Self::new(alpha, eta, calibration, false)
    }

    pub fn clipped(alpha: f64, eta: f64, calibration: &[f64]) -> Result<Self> {
        Self::new(alpha, eta, calibration, true)
    }

    pub fn is_clipped(&self) -> bool {
        self.clipped
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Working miscoverage level `alpha_t`; may leave `(0, 1)`.
    pub fn alpha_t(&self) -> f64 {
        1.0 - self.level
    }

    /// `1 - alpha_t`.
    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn ledger(&self) -> &CoverageLedger {
        &self.ledger
    }

    pub fn history(&self) -> &[f64] {
        &self.sorted
    }

    pub fn max_score(&self) -> f64 {
        // nonempty by construction
        *self.sorted.last().expect("history is nonempty")
    }

    /// Quantile for the next set. Plain ACI returns `+inf` when `alpha_t < 0`
    /// and `-inf` when `alpha_t > 1`; the clipped variant caps at the largest
    /// score seen so far.
    pub fn quantile(&self) -> f64 {
        let q = empirical_quantile(&self.sorted, self.level).expect("history is nonempty");
        if self.clipped {
            q.min(self.max_score())
        } else {
            q
        }
    }

    /// Secondary score of `score` against the current history.
    pub fn beta(&self, score: f64) -> f64 {
        beta_t(&self.sorted, score).expect("history is nonempty")
    }

    /// `alpha_{t+1} = alpha_t - eta (err - alpha)`, then `score` joins the history.
    #[must_use]
    pub fn step(mut self, err: bool, score: f64) -> Self {
        let g = if err { 1.0 } else { 0.0 } - self.ledger.alpha();
        self.level += self.eta * g;
        self.ledger = self.ledger.record_err(err);
        let at = self.sorted.partition_point(|&h| h.total_cmp(&score).is_lt());
        self.sorted.insert(at, score);
        self
    }
}
