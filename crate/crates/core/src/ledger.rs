// SPDX-License-Identifier: MIT OR Apache-2.0

//! Running coverage bookkeeping shared by every controller.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cumulative coverage error `E_t = sum_{i<=t} (v_i - alpha)`, where `v_i` is a
/// miscoverage indicator (coverage mode) or a loss in `[0, 1]` (risk mode).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageLedger {
    alpha: f64,
    running_error_sum: f64,
    history: Vec<f64>,
}

impl CoverageLedger {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidLevel(alpha));
        }
        Ok(Self {
            alpha,
            running_error_sum: 0.0,
            history: Vec::new(),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Number of recorded steps.
    pub fn t(&self) -> u64 {
        self.history.len() as u64
    }

    pub fn running_error_sum(&self) -> f64 {
        self.running_error_sum
    }

    pub fn history(&self) -> &[f64] {
        &self.history
    }

    /// Records one step's miscoverage indicator or loss.
    pub fn update(mut self, value: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::ValueOutOfRange(value));
        }
        self.running_error_sum += value - self.alpha;
        self.history.push(value);
        Ok(self)
    }

    pub fn record_err(self, err: bool) -> Self {
        let value = if err { 1.0 } else { 0.0 };
        // infallible: 0 and 1 are in range
        self.update(value).expect("binary err is in range")
    }

    /// Recomputes the error sum from the stored history.
    pub fn replay_sum(&self) -> f64 {
        self.history.iter().map(|v| v - self.alpha).sum()
    }
}

/// The last `capacity` scores, used for the trailing maximum `B_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreWindow {
    capacity: usize,
    buffer: VecDeque<f64>,
}

impl ScoreWindow {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::InvalidParameter(
                "score window length must be positive".into(),
            ));
        }
        Ok(Self {
            capacity,
            buffer: VecDeque::with_capacity(capacity),
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.buffer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buffer.is_empty()
    }

    pub fn push(&mut self, score: f64) {
        if self.buffer.len() == self.capacity {
            self.buffer.pop_front();
        }
        self.buffer.push_back(score);
    }

    pub fn with(mut self, score: f64) -> Self {
        self.push(score);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        self.buffer.iter()
    }

    pub fn trailing_max(&self) -> Result<f64> {
        self.buffer
            .iter()
            .copied()
            .reduce(f64::max)
            .ok_or(Error::EmptyHistory("trailing_max"))
    }
}
