// SPDX-License-Identifier: MIT OR Apache-2.0

//! Quantile tracking: online subgradient descent on the pinball loss.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ledger::CoverageLedger;

/// P controller. `q <- q + eta (err - alpha)`.
///
/// Started from `q_1 = 0` with a fixed rate, `q_{t+1} = eta * E_t`; the tracker
/// is a linear error integrator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileTracker {
    q: f64,
    ledger: CoverageLedger,
}

impl QuantileTracker {
    pub fn new(alpha: f64) -> Result<Self> {
        Self::with_initial(alpha, 0.0)
    }

    pub fn with_initial(alpha: f64, q1: f64) -> Result<Self> {
        Ok(Self {
            q: q1,
            ledger: CoverageLedger::new(alpha)?,
        })
    }

    /// Quantile for the next prediction set.
    pub fn quantile(&self) -> f64 {
        self.q
    }

    pub fn ledger(&self) -> &CoverageLedger {
        &self.ledger
    }

    #[must_use]
    pub fn step(self, err: bool, eta: f64) -> Self {
        debug_assert!(eta >= 0.0, "negative learning rate {eta}");
        let alpha = self.ledger.alpha();
        let g = if err { 1.0 } else { 0.0 } - alpha;
        Self {
            q: self.q + eta * g,
            ledger: self.ledger.record_err(err),
        }
    }

    /// Runs the tracker against a score sequence, returning the err sequence.
    /// Handy for audits where there is no response variable.
    pub fn run_on_scores(mut self, scores: &[f64], eta: f64) -> (Self, Vec<bool>) {
        let mut errs = Vec::with_capacity(scores.len());
        for &s in scores {
            let err = s > self.q;
            errs.push(err);
            self = self.step(err, eta);
        }
        (self, errs)
    }
}
