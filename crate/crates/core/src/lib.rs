// SPDX-License-Identifier: MIT OR Apache-2.0

//! Online conformal prediction under distribution shift.
//!
//! Prediction sets `{y : s_t(x_t, y) <= q_t}` are driven by a controller that
//! updates `q_t` from past coverage errors: a quantile tracker (P), a
//! saturated error integrator (I), a scorecaster (D), adaptive conformal
//! inference and its clipped variant, and a risk-control iteration.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod control;
pub mod data;
pub mod error;
pub mod forecast;
pub mod interval;
pub mod ledger;
pub mod loss;
pub mod scores;
pub mod series;

pub use error::{Error, Result};
pub use interval::{IntervalSet, SetKind};
pub use ledger::{CoverageLedger, ScoreWindow};
pub use loss::{pinball_loss, pinball_subgradient};
pub use scores::{coverage_indicator, compute_scores, invert_to_set, Forecast, Quantile, Score, ScoreKind, ScorePair};
pub use series::SeriesPoint;
