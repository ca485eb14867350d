// SPDX-License-Identifier: MIT OR Apache-2.0

use serde::{Deserialize, Serialize};

/// One observation of a time series. `t` starts at 1 and increases by one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub t: u64,
    pub x: Vec<f64>,
    pub y: f64,
}

impl SeriesPoint {
    pub fn new(t: u64, x: Vec<f64>, y: f64) -> Self {
        Self { t, x, y }
    }
}
