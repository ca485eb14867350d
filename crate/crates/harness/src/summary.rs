// SPDX-License-Identifier: MIT OR Apache-2.0

//! Run-level metrics, computed from the step records alone.

use conformal_pid::SetKind;
use serde::{Deserialize, Serialize};

use crate::runner::StepRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrailingCoverage {
    pub window: usize,
    /// Coverage over the last `min(k, window)` steps, for each step `k`.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub steps: usize,
    /// `1 - mean(err)`.
    pub marginal_coverage: f64,
    /// Mean width over sets with finite width; empty sets count as 0. `None`
    /// when no set had finite width.
    pub average_size: Option<f64>,
    /// Steps whose quantile was `+inf` on either side.
    pub fraction_infinite: f64,
    pub fraction_empty: f64,
    pub longest_miscoverage_run: usize,
    pub trailing_coverage: Vec<TrailingCoverage>,
}

pub fn trailing_coverage(errs: &[bool], window: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(errs.len());
    let mut misses = 0usize;
    for k in 0..errs.len() {
        misses += usize::from(errs[k]);
        if k >= window {
            misses -= usize::from(errs[k - window]);
        }
        let len = (k + 1).min(window);
        out.push(1.0 - misses as f64 / len as f64);
    }
    out
}

pub fn summarize(records: &[StepRecord], windows: &[usize]) -> RunSummary {
    let n = records.len();
    let nf = n as f64;
    let errs: Vec<bool> = records.iter().map(|r| r.err).collect();
    let misses = errs.iter().filter(|&&e| e).count();

    let widths: Vec<f64> = records
        .iter()
        .map(|r| match r.set_kind {
            SetKind::Empty => 0.0,
            SetKind::Full => f64::INFINITY,
            SetKind::Interval => r.set_hi - r.set_lo,
        })
        .filter(|w| w.is_finite())
        .collect();
    let average_size = (!widths.is_empty()).then(|| widths.iter().sum::<f64>() / widths.len() as f64);

    let infinite = records
        .iter()
        .filter(|r| r.q_lo == f64::INFINITY || r.q_hi == f64::INFINITY)
        .count();
    let empty = records.iter().filter(|r| r.set_kind == SetKind::Empty).count();

    let mut longest = 0;
    let mut run = 0;
    for &e in &errs {
        run = if e { run + 1 } else { 0 };
        longest = longest.max(run);
    }

    RunSummary {
        steps: n,
        marginal_coverage: 1.0 - misses as f64 / nf,
        average_size,
        fraction_infinite: infinite as f64 / nf,
        fraction_empty: empty as f64 / nf,
        longest_miscoverage_run: longest,
        trailing_coverage: windows
            .iter()
            .map(|&w| TrailingCoverage {
                window: w,
                values: trailing_coverage(&errs, w),
            })
            .collect(),
    }
}
