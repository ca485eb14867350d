// SPDX-License-Identifier: MIT OR Apache-2.0

//! Time-series ingestion and synthetic score generators.

pub mod csv;
pub mod synth;

use serde::{Deserialize, Serialize};

use crate::series::SeriesPoint;

pub use self::csv::{load_csv, write_csv};
pub use synth::{synth_scores, SynthKind, SynthSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    #[default]
    None,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub points: Vec<SeriesPoint>,
    pub y_column: String,
    pub feature_columns: Vec<String>,
    pub source: String,
    pub transform: Transform,
    /// Rows skipped during ingestion because a needed cell was empty or not a number.
    pub dropped_rows: usize,
}

impl Dataset {
    /// Builds a dataset from bare responses, with `t = 1, 2, ...` and no features.
    pub fn from_values(name: &str, ys: &[f64]) -> Self {
        Dataset {
            name: name.to_string(),
            points: ys
                .iter()
                .enumerate()
                .map(|(i, &y)| SeriesPoint::new(i as u64 + 1, Vec::new(), y))
                .collect(),
            y_column: "y".to_string(),
            feature_columns: Vec::new(),
            source: "memory".to_string(),
            transform: Transform::None,
            dropped_rows: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ys(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.y).collect()
    }

    pub fn xs(&self) -> Vec<Vec<f64>> {
        self.points.iter().map(|p| p.x.clone()).collect()
    }

    /// The first `n` points; used to check that runs never look ahead.
    pub fn truncated(&self, n: usize) -> Self {
        let mut out = self.clone();
        out.points.truncate(n);
        out
    }
}
