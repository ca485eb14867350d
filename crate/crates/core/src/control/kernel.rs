// SPDX-License-Identifier: MIT OR Apache-2.0

//! Kernel-weighted error integration.
//!
//! `q_{t+1} = r_t(sum_{i<=t} (err_i - alpha) K((i, x_i, y_i), (t, x_t, y_t)))`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::control::saturation::Saturation;
use crate::error::{Error, Result};
use crate::ledger::CoverageLedger;

/// One step's `(i, x_i, y_i)` as seen by a kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub t: u64,
    pub x: Vec<f64>,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec {
    /// Weight 1 everywhere; the plain integrator.
    Uniform,
    /// Weight 1 when `t - i <= width`: the current step and the `width`
    /// steps before it.
    TrailingWindow { width: u64 },
    /// Weight 1 when `x_i[feature]` and `x_t[feature]` fall in the same bin.
    /// Bins are delimited by ascending `edges`; a value equal to an edge goes
    /// to the bin above it. Observations without the feature share one bin.
    BinMatch { feature: usize, edges: Vec<f64> },
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            KernelSpec::Uniform => Ok(()),
            KernelSpec::TrailingWindow { .. } => Ok(()),
            KernelSpec::BinMatch { edges, .. } => {
                if edges.windows(2).all(|w| w[0] < w[1]) && edges.iter().all(|e| e.is_finite()) {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(
                        "bin edges must be finite and strictly increasing".into(),
                    ))
                }
            }
        }
    }

    fn bin(feature: usize, edges: &[f64], x: &[f64]) -> Option<usize> {
        x.get(feature).map(|&v| edges.partition_point(|&e| e <= v))
    }

    pub fn weight(&self, past: &Observation, current: &Observation) -> f64 {
        let hit = match self {
            KernelSpec::Uniform => true,
            KernelSpec::TrailingWindow { width } => current.t.saturating_sub(past.t) <= *width,
            KernelSpec::BinMatch { feature, edges } => {
                Self::bin(*feature, edges, &past.x) == Self::bin(*feature, edges, &current.x)
            }
        };
        if hit {
            1.0
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelIntegrator {
    saturation: Saturation,
    kernel: KernelSpec,
    ledger: CoverageLedger,
    history: Vec<(Observation, f64)>,
    bin_sums: BTreeMap<Option<usize>, f64>,
    weighted_sum: f64,
    q: f64,
}

impl KernelIntegrator {
    pub fn new(alpha: f64, saturation: Saturation, kernel: KernelSpec) -> Result<Self> {
        saturation.validate()?;
        kernel.validate()?;
        Ok(Self {
            saturation,
            kernel,
            ledger: CoverageLedger::new(alpha)?,
            history: Vec::new(),
            bin_sums: BTreeMap::new(),
            weighted_sum: 0.0,
            q: saturation.eval(0.0, 1),
        })
    }

    pub fn quantile(&self) -> f64 {
        self.q
    }

    pub fn ledger(&self) -> &CoverageLedger {
        &self.ledger
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    /// The kernel-weighted error sum used for the latest quantile.
    pub fn weighted_sum(&self) -> f64 {
        self.weighted_sum
    }

    pub fn history(&self) -> &[(Observation, f64)] {
        &self.history
    }

    pub fn effective_rate(&self) -> f64 {
        self.saturation.effective_rate(self.weighted_sum, self.ledger.t())
    }

    #[must_use]
    pub fn step(mut self, err: bool, obs: Observation) -> Self {
        let g = if err { 1.0 } else { 0.0 } - self.ledger.alpha();
        self.ledger = self.ledger.record_err(err);
        self.weighted_sum = match &self.kernel {
            KernelSpec::Uniform => self.ledger.running_error_sum(),
            KernelSpec::TrailingWindow { width } => {
                let now = obs.t;
                let mut sum = g;
                for (past, g_past) in self.history.iter().rev() {
                    if now.saturating_sub(past.t) > *width {
                        break;
                    }
                    sum += g_past;
                }
                sum
            }
            KernelSpec::BinMatch { feature, edges } => {
                let slot = self
                    .bin_sums
                    .entry(KernelSpec::bin(*feature, edges, &obs.x))
                    .or_insert(0.0);
                *slot += g;
                *slot
            }
        };
        self.q = self.saturation.eval(self.weighted_sum, self.ledger.t());
        self.history.push((obs, g));
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::integrator::ErrorIntegrator;
    use proptest::prelude::*;

    fn obs(t: u64, x: f64) -> Observation {
        Observation { t, x: vec![x], y: 0.0 }
    }

    fn tan() -> Saturation {
        Saturation::tan(1.0, 0.5).unwrap()
    }

    #[test]
    fn weights() {
        let k = KernelSpec::TrailingWindow { width: 3 };
        assert_eq!(k.weight(&obs(7, 0.0), &obs(10, 0.0)), 1.0);
        assert_eq!(k.weight(&obs(6, 0.0), &obs(10, 0.0)), 0.0);
        let b = KernelSpec::BinMatch { feature: 0, edges: vec![0.0, 1.0] };
        assert_eq!(b.weight(&obs(1, 0.2), &obs(2, 0.9)), 1.0);
        assert_eq!(b.weight(&obs(1, -0.2), &obs(2, 0.9)), 0.0);
        assert_eq!(b.weight(&obs(1, 1.0), &obs(2, 0.9)), 0.0);
        assert!(KernelSpec::BinMatch { feature: 0, edges: vec![1.0, 0.0] }.validate().is_err());
    }

    #[test]
    fn uniform_and_single_bin_match_pi() {
        let errs: Vec<bool> = (0..400).map(|i| (i * 7 + i / 13) % 5 == 0).collect();
        let mut pi = ErrorIntegrator::new(0.1, tan()).unwrap();
        let mut uni = KernelIntegrator::new(0.1, tan(), KernelSpec::Uniform).unwrap();
        let mut bins = KernelIntegrator::new(
            0.1,
            tan(),
            KernelSpec::BinMatch { feature: 0, edges: vec![-10.0, 10.0] },
        )
        .unwrap();
        for (i, &e) in errs.iter().enumerate() {
            let t = i as u64 + 1;
            pi = pi.pi_step(e);
            uni = uni.step(e, obs(t, 0.5));
            bins = bins.step(e, obs(t, (t as f64).sin()));
            assert_eq!(uni.quantile(), pi.quantile());
            assert_eq!(bins.quantile(), pi.quantile());
        }
    }

    proptest! {
        #[test]
        fn fast_paths_match_brute_force(errs in proptest::collection::vec(any::<bool>(), 1..200),
                                        xs in proptest::collection::vec(-3f64..3.0, 200),
                                        width in 0u64..30,
                                        use_bins in any::<bool>()) {
            let kernel = if use_bins {
                KernelSpec::BinMatch { feature: 0, edges: vec![-1.0, 0.0, 1.5] }
            } else {
                KernelSpec::TrailingWindow { width }
            };
            let alpha = 0.2;
            let mut k = KernelIntegrator::new(alpha, tan(), kernel.clone()).unwrap();
            let mut seen: Vec<(Observation, f64)> = Vec::new();
            for (i, &e) in errs.iter().enumerate() {
                let o = obs(i as u64 + 1, xs[i]);
                seen.push((o.clone(), if e { 1.0 } else { 0.0 } - alpha));
                k = k.step(e, o.clone());
                let brute: f64 = seen.iter().map(|(p, g)| g * kernel.weight(p, &o)).sum();
                prop_assert!((k.weighted_sum() - brute).abs() <= 1e-9 * (i + 1) as f64);
            }
        }
    }
}
