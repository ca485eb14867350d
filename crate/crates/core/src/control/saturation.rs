// SPDX-License-Identifier: MIT OR Apache-2.0

//! Saturation functions `r_t` applied to the cumulative coverage error.
//!
//! Each function satisfies: `x > c h(t)` implies `r_t(x) >= b`, and
//! `x < -c h(t)` implies `r_t(x) <= -b`. [`Saturation::threshold`] returns
//! `c h(t)` for a given score bound `b`.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `max(ln t, 1)`. Keeps the tan integrator's argument nonzero at `t = 1`.
pub fn log_clamp(t: u64) -> f64 {
    (t.max(1) as f64).ln().max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Saturation {
    /// `K_I tan(x L(t) / (t C_sat))`, infinite once the argument leaves
    /// `[-pi/2, pi/2]`.
    Tan { k_i: f64, c_sat: f64 },
    /// `eta x`. With this integrator the error integrator is exactly the
    /// quantile tracker started at zero.
    Linear { eta: f64 },
    /// `eta x / sqrt(t)`.
    DecayingLinear { eta: f64 },
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

impl Saturation {
    pub fn tan(k_i: f64, c_sat: f64) -> Result<Self> {
        Ok(Saturation::Tan {
            k_i: positive("K_I", k_i)?,
            c_sat: positive("C_sat", c_sat)?,
        })
    }

    pub fn linear(eta: f64) -> Result<Self> {
        Ok(Saturation::Linear {
            eta: positive("eta", eta)?,
        })
    }

    pub fn decaying_linear(eta: f64) -> Result<Self> {
        Ok(Saturation::DecayingLinear {
            eta: positive("eta", eta)?,
        })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Saturation::Tan { k_i, c_sat } => Saturation::tan(k_i, c_sat).map(|_| ()),
            Saturation::Linear { eta } | Saturation::DecayingLinear { eta } => {
                positive("eta", eta).map(|_| ())
            }
        }
    }

    /// Whether the function reaches `+-inf`, i.e. saturates for every bound `b`.
    pub fn is_unbounded(&self) -> bool {
        matches!(self, Saturation::Tan { .. })
    }

    /// `c h(t)`. The tan function ignores `score_bound` because it saturates
    /// to infinity.
    pub fn threshold(&self, t: u64, score_bound: f64) -> f64 {
        let t = t.max(1);
        match *self {
            Saturation::Tan { c_sat, .. } => FRAC_PI_2 * c_sat * t as f64 / log_clamp(t),
            Saturation::Linear { eta } => score_bound / eta,
            Saturation::DecayingLinear { eta } => score_bound * (t as f64).sqrt() / eta,
        }
    }

    pub fn eval(&self, x: f64, t: u64) -> f64 {
        let t = t.max(1);
        match *self {
            Saturation::Tan { k_i, c_sat } => {
                let limit = self.threshold(t, f64::INFINITY);
                if x > limit {
                    f64::INFINITY
                } else if x < -limit {
                    f64::NEG_INFINITY
                } else {
                    let arg = (x * log_clamp(t) / (t as f64 * c_sat)).clamp(-FRAC_PI_2, FRAC_PI_2);
                    k_i * arg.tan()
                }
            }
            Saturation::Linear { eta } => eta * x,
            Saturation::DecayingLinear { eta } => eta * x / (t as f64).sqrt(),
        }
    }

    /// Derivative of `r_t` at `x`: the step size the integrator effectively
    /// applies to the next `err - alpha`.
    pub fn effective_rate(&self, x: f64, t: u64) -> f64 {
        let t = t.max(1);
        match *self {
            Saturation::Tan { k_i, c_sat } => {
                if x.abs() > self.threshold(t, f64::INFINITY) {
                    return f64::INFINITY;
                }
                let scale = log_clamp(t) / (t as f64 * c_sat);
                let cos = (x * scale).clamp(-FRAC_PI_2, FRAC_PI_2).cos();
                k_i * scale / (cos * cos)
            }
            Saturation::Linear { eta } => eta,
            Saturation::DecayingLinear { eta } => eta / (t as f64).sqrt(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn tan_examples() {
        let sat = Saturation::tan(1.0, 4.0 / PI).unwrap();
        for t in [1, 2, 3, 100] {
            assert_eq!(sat.eval(0.0, t), 0.0);
        }
        let x = 3.0 / 3f64.ln();
        assert_relative_eq!(sat.eval(x, 3), 1.0, epsilon = 1e-12);
        assert_eq!(sat.eval(1e6, 3), f64::INFINITY);
        assert_eq!(sat.eval(-1e6, 3), f64::NEG_INFINITY);
    }

    #[test]
    fn linear_examples() {
        let lin = Saturation::linear(0.5).unwrap();
        assert_eq!(lin.eval(3.0, 7), 1.5);
        let dec = Saturation::decaying_linear(2.0).unwrap();
        assert_relative_eq!(dec.eval(3.0, 4), 3.0, epsilon = 1e-15);
    }

    #[test]
    fn constructors_validate() {
        assert!(Saturation::tan(0.0, 1.0).is_err());
        assert!(Saturation::tan(1.0, -1.0).is_err());
        assert!(Saturation::linear(0.0).is_err());
        assert!(Saturation::decaying_linear(f64::NAN).is_err());
    }

    #[test]
    fn log_clamp_floor() {
        assert_eq!(log_clamp(1), 1.0);
        assert_eq!(log_clamp(2), 1.0);
        assert_eq!(log_clamp(0), 1.0);
        assert_relative_eq!(log_clamp(100), 100f64.ln());
    }

    #[test]
    fn saturation_condition_holds_just_past_threshold() {
        let sat = Saturation::tan(2.0, 0.7).unwrap();
        for t in [1u64, 2, 3, 10, 1000, 50_000] {
            let thr = sat.threshold(t, f64::INFINITY);
            let above = thr + thr.abs() * 1e-12 + 1e-12;
            assert_eq!(sat.eval(above, t), f64::INFINITY);
            assert_eq!(sat.eval(-above, t), f64::NEG_INFINITY);
            // at the threshold itself the output is finite but positive
            assert!(sat.eval(thr, t) > 0.0);
            assert!(sat.eval(-thr, t) < 0.0);
        }
        let lin = Saturation::linear(0.1).unwrap();
        assert!(lin.eval(lin.threshold(5, 2.0), 5) >= 2.0 - 1e-12);
        let dec = Saturation::decaying_linear(0.1).unwrap();
        assert!(dec.eval(dec.threshold(25, 2.0), 25) >= 2.0 - 1e-12);
    }

    proptest! {
        #[test]
        fn tan_is_odd_and_monotone(x in -50f64..50.0, dx in 0f64..5.0, t in 1u64..10_000) {
            let sat = Saturation::tan(1.5, 0.8).unwrap();
            prop_assert_eq!(sat.eval(-x, t), -sat.eval(x, t));
            prop_assert!(sat.eval(x + dx, t) >= sat.eval(x, t));
        }

        // Larger coverage gaps are corrected with larger steps.
        #[test]
        fn tan_effective_rate_grows_with_gap(frac in 0f64..0.98, grow in 0f64..1.0, t in 1u64..5000, step in 1e-3f64..0.5) {
            let sat = Saturation::tan(1.0, 0.9).unwrap();
            let thr = sat.threshold(t, f64::INFINITY);
            let small = frac * thr;
            let large = (frac + grow * (0.98 - frac)) * thr;
            prop_assert!(sat.effective_rate(large, t) >= sat.effective_rate(small, t));
            prop_assert!(sat.effective_rate(-large, t) >= sat.effective_rate(-small, t));
            // finite-difference view: moving outward by the same amount changes q more
            let d = step * thr * 0.01;
            let inc_small = (sat.eval(small + d, t) - sat.eval(small, t)).abs();
            let inc_large = (sat.eval(large + d, t) - sat.eval(large, t)).abs();
            prop_assert!(inc_large >= inc_small * (1.0 - 1e-9));
        }
    }
}
