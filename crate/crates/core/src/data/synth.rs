// SPDX-License-Identifier: MIT OR Apache-2.0

//! Seeded synthetic score sequences.
//!
//! Draws come from ChaCha20 seeded with `seed_from_u64`, so a spec maps to the
//! same sequence on every platform.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthKind {
    Iid,
    Increasing,
    ChangepointMix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub kind: SynthKind,
    pub length: usize,
    pub seed: u64,
    pub noise: f64,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.length == 0 {
            return Err(Error::InvalidParameter("synthetic length must be at least 1".into()));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(Error::InvalidParameter(format!("noise scale must be >= 0, got {}", self.noise)));
        }
        Ok(())
    }
}

/// Noise-free level at step `t` (1-based) of a length-`n` sequence.
fn level(kind: SynthKind, t: usize, n: usize) -> f64 {
    let nf = n as f64;
    match kind {
        SynthKind::Iid => 0.0,
        SynthKind::Increasing => t as f64 / nf,
        SynthKind::ChangepointMix => {
            let (a, b, c) = (n / 3, 2 * n / 3, 5 * n / 6);
            if t <= a {
                0.0
            } else if t <= b {
                3.0 * (t - a) as f64 / nf
            } else if t <= c {
                3.0
            } else {
                1.0
            }
        }
    }
}

pub fn synth_scores(spec: &SynthSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    Ok((1..=spec.length)
        .map(|t| {
            let g: f64 = StandardNormal.sample(&mut rng);
            level(spec.kind, t, spec.length) + spec.noise * g
        })
        .collect())
}
