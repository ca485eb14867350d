// SPDX-License-Identifier: MIT OR Apache-2.0

//! Conformal scores and their inversion into prediction sets.
//!
//! Asymmetric kinds carry one score per side. Each side is driven by its own
//! controller at half the miscoverage budget; the set is the intersection of
//! the two one-sided sets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::IntervalSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreKind {
    /// `|y - f|`.
    AbsoluteResidual,
    /// `(f - y, y - f)`.
    SignedResidualAsymmetric,
    /// `(f_lo - y, y - f_hi)` for a pair of quantile forecasts.
    QuantileAsymmetric,
}

impl ScoreKind {
    pub fn name(self) -> &'static str {
        match self {
            ScoreKind::AbsoluteResidual => "absolute_residual",
            ScoreKind::SignedResidualAsymmetric => "signed_residual_asymmetric",
            ScoreKind::QuantileAsymmetric => "quantile_asymmetric",
        }
    }

    pub fn is_asymmetric(self) -> bool {
        !matches!(self, ScoreKind::AbsoluteResidual)
    }

    pub fn needs_band_forecast(self) -> bool {
        matches!(self, ScoreKind::QuantileAsymmetric)
    }
}

/// Output of a base forecaster.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Forecast {
    Point(f64),
    Band { lo: f64, hi: f64 },
}

impl Forecast {
    /// `(lo, hi)`; a point forecast reports the same value twice.
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            Forecast::Point(f) => (f, f),
            Forecast::Band { lo, hi } => (lo, hi),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScorePair {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Score {
    Single(f64),
    Pair(ScorePair),
}

impl Score {
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            Score::Single(s) => (s, s),
            Score::Pair(p) => (p.lo, p.hi),
        }
    }
}

/// Quantile estimate(s) matching a [`ScoreKind`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Quantile {
    Single(f64),
    Pair { lo: f64, hi: f64 },
}

impl Quantile {
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            Quantile::Single(q) => (q, q),
            Quantile::Pair { lo, hi } => (lo, hi),
        }
    }
}

fn arity(kind: ScoreKind, detail: &str) -> Error {
    Error::ArityMismatch {
        kind: kind.name(),
        detail: detail.to_string(),
    }
}

pub fn compute_scores(kind: ScoreKind, forecast: &Forecast, y: f64) -> Result<Score> {
    match (kind, *forecast) {
        (ScoreKind::AbsoluteResidual, Forecast::Point(f)) => Ok(Score::Single((y - f).abs())),
        (ScoreKind::SignedResidualAsymmetric, Forecast::Point(f)) => {
            Ok(Score::Pair(ScorePair { lo: f - y, hi: y - f }))
        }
        (ScoreKind::QuantileAsymmetric, Forecast::Band { lo, hi }) => {
            Ok(Score::Pair(ScorePair { lo: lo - y, hi: y - hi }))
        }
        (ScoreKind::QuantileAsymmetric, Forecast::Point(_)) => {
            Err(arity(kind, "needs lower and upper quantile forecasts"))
        }
        (_, Forecast::Band { .. }) => Err(arity(kind, "needs a point forecast")),
    }
}

/// `{y : s(y) <= q}` as an interval.
pub fn invert_to_set(kind: ScoreKind, forecast: &Forecast, q: &Quantile) -> Result<IntervalSet> {
    let set = match (kind, *forecast, *q) {
        (ScoreKind::AbsoluteResidual, Forecast::Point(f), Quantile::Single(q)) => {
            if q == f64::INFINITY {
                IntervalSet::full()
            } else {
                // q < 0 inverts the bounds, which classifies as empty
                IntervalSet::from_bounds(f - q, f + q)
            }
        }
        (ScoreKind::SignedResidualAsymmetric, Forecast::Point(f), Quantile::Pair { lo, hi }) => {
            IntervalSet::from_bounds(f - lo, f + hi)
        }
        (ScoreKind::QuantileAsymmetric, Forecast::Band { lo: f_lo, hi: f_hi }, Quantile::Pair { lo, hi }) => {
            IntervalSet::from_bounds(f_lo - lo, f_hi + hi)
        }
        (ScoreKind::AbsoluteResidual, _, _) => {
            return Err(arity(kind, "needs a point forecast and a single quantile"))
        }
        (ScoreKind::SignedResidualAsymmetric, _, _) => {
            return Err(arity(kind, "needs a point forecast and a quantile pair"))
        }
        (ScoreKind::QuantileAsymmetric, _, _) => {
            return Err(arity(kind, "needs a quantile band forecast and a quantile pair"))
        }
    };
    Ok(set)
}

/// `err = 1{y not in set}`.
pub fn coverage_indicator(set: &IntervalSet, y: f64) -> bool {
    !set.contains(y)
}

/// The score-space set `{s : s <= q}` used when the input is a raw score
/// sequence rather than responses.
pub fn score_halfline(q: f64) -> IntervalSet {
    if q == f64::INFINITY {
        IntervalSet::full()
    } else {
        IntervalSet::from_bounds(f64::NEG_INFINITY, q)
    }
}
