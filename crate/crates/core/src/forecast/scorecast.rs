// SPDX-License-Identifier: MIT OR Apache-2.0

//! Scorecasting: forecasting the next score quantile from past scores.
//!
//! Until enough history has accumulated the scorecast is 0, which makes a PID
//! controller behave exactly like its PI counterpart.

use crate::error::{Error, Result};
use crate::forecast::{ForecasterKind, ForecasterSpec, OnlineForecaster};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scorecast {
    pub value: f64,
    pub warm_up: bool,
}

impl Scorecast {
    fn neutral() -> Self {
        Scorecast {
            value: 0.0,
            warm_up: true,
        }
    }
}

/// Stateful scorecaster. A quantile-regression spec without an explicit
/// `tau` targets the `1 - alpha` quantile of the next score.
#[derive(Debug, Clone)]
pub struct Scorecaster {
    inner: OnlineForecaster,
}

impl Scorecaster {
    pub fn new(spec: ForecasterSpec, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidLevel(alpha));
        }
        let explicit_tau = matches!(spec.kind, ForecasterKind::L1Quantile { tau: Some(_), .. });
        let quantile = spec.is_quantile();
        let mut inner = OnlineForecaster::new(spec)?;
        if quantile && !explicit_tau {
            inner = inner.with_tau(1.0 - alpha)?;
        }
        Ok(Scorecaster { inner })
    }

    pub fn spec(&self) -> &ForecasterSpec {
        self.inner.spec()
    }

    /// Scorecast for the next step given scores (and aligned covariates) so far.
    pub fn next(&mut self, scores: &[f64], xs: &[Vec<f64>], x_next: &[f64]) -> Result<Scorecast> {
        if !self.inner.ready(scores.len()) {
            return Ok(Scorecast::neutral());
        }
        let value = self.inner.predict(scores, xs, x_next)?;
        Ok(Scorecast {
            value,
            warm_up: false,
        })
    }
}

/// One-shot scorecast; fits from scratch on `score_history`.
pub fn scorecast(
    spec: &ForecasterSpec,
    score_history: &[f64],
    exogenous: Option<(&[Vec<f64>], &[f64])>,
    alpha: f64,
) -> Result<Scorecast> {
    let mut sc = Scorecaster::new(spec.clone(), alpha)?;
    match exogenous {
        Some((xs, x_next)) => sc.next(score_history, xs, x_next),
        None => sc.next(score_history, &[], &[]),
    }
}
