// SPDX-License-Identifier: MIT OR Apache-2.0

//! Prediction sets over the real line.
//!
//! Bounds are extended reals: `f64::NEG_INFINITY` and `f64::INFINITY` stand
//! for the unbounded ends. Emptiness is carried by [`SetKind`] rather than by
//! the bounds, so an inverted interval keeps its raw bounds for auditing.

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetKind {
    Interval,
    Empty,
    Full,
}

impl SetKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SetKind::Interval => "interval",
            SetKind::Empty => "empty",
            SetKind::Full => "full",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "interval" => Some(SetKind::Interval),
            "empty" => Some(SetKind::Empty),
            "full" => Some(SetKind::Full),
            _ => None,
        }
    }
}

impl fmt::Display for SetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A closed interval `[lower, upper]`, possibly half-infinite, empty or full.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalSet {
    pub lower: f64,
    pub upper: f64,
    pub kind: SetKind,
}

impl IntervalSet {
    /// Classifies raw bounds. A set whose upper end is `-inf`, whose lower end
    /// is `+inf`, or whose ends are inverted contains no real point.
    pub fn from_bounds(lower: f64, upper: f64) -> Self {
        let kind = if lower.is_nan()
            || upper.is_nan()
            || lower > upper
            || upper == f64::NEG_INFINITY
            || lower == f64::INFINITY
        {
            SetKind::Empty
        } else if lower == f64::NEG_INFINITY && upper == f64::INFINITY {
            SetKind::Full
        } else {
            SetKind::Interval
        };
        Self { lower, upper, kind }
    }

    pub fn full() -> Self {
        Self::from_bounds(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn empty() -> Self {
        Self {
            lower: f64::INFINITY,
            upper: f64::NEG_INFINITY,
            kind: SetKind::Empty,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.kind == SetKind::Empty
    }

    pub fn is_full(&self) -> bool {
        self.kind == SetKind::Full
    }

    pub fn contains(&self, y: f64) -> bool {
        match self.kind {
            SetKind::Empty => false,
            SetKind::Full => true,
            SetKind::Interval => self.lower <= y && y <= self.upper,
        }
    }

    /// Length of the set; `0` when empty, `+inf` when either end is unbounded.
    pub fn width(&self) -> f64 {
        match self.kind {
            SetKind::Empty => 0.0,
            SetKind::Full => f64::INFINITY,
            SetKind::Interval => self.upper - self.lower,
        }
    }

    /// Distance from `y` to the nearest point of the set; `+inf` when empty.
    pub fn distance(&self, y: f64) -> f64 {
        match self.kind {
            SetKind::Empty => f64::INFINITY,
            SetKind::Full => 0.0,
            SetKind::Interval => {
                if y < self.lower {
                    self.lower - y
                } else if y > self.upper {
                    y - self.upper
                } else {
                    0.0
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        assert_eq!(IntervalSet::from_bounds(1.0, 5.0).kind, SetKind::Interval);
        assert_eq!(IntervalSet::from_bounds(5.0, 1.0).kind, SetKind::Empty);
        assert_eq!(
            IntervalSet::from_bounds(f64::NEG_INFINITY, f64::INFINITY).kind,
            SetKind::Full
        );
        assert_eq!(
            IntervalSet::from_bounds(f64::NEG_INFINITY, 2.0).kind,
            SetKind::Interval
        );
        assert_eq!(
            IntervalSet::from_bounds(f64::NEG_INFINITY, f64::NEG_INFINITY).kind,
            SetKind::Empty
        );
        assert_eq!(
            IntervalSet::from_bounds(f64::INFINITY, f64::INFINITY).kind,
            SetKind::Empty
        );
        // a degenerate point is still an interval
        assert_eq!(IntervalSet::from_bounds(3.0, 3.0).kind, SetKind::Interval);
    }

    #[test]
    fn distance_and_width() {
        let set = IntervalSet::from_bounds(1.0, 5.0);
        assert_eq!(set.distance(0.0), 1.0);
        assert_eq!(set.distance(3.0), 0.0);
        assert_eq!(set.distance(7.5), 2.5);
        assert_eq!(set.width(), 4.0);
        assert_eq!(IntervalSet::empty().width(), 0.0);
        assert!(IntervalSet::empty().distance(0.0).is_infinite());
        assert_eq!(IntervalSet::full().distance(1e300), 0.0);
    }
}
