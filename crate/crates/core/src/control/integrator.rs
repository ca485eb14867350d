// SPDX-License-Identifier: MIT OR Apache-2.0

//! Saturated error integration, with an optional scorecast offset, and its
//! risk-control generalization.

use serde::{Deserialize, Serialize};

use crate::control::saturation::Saturation;
use crate::error::Result;
use crate::ledger::CoverageLedger;

/// Integral controller. After each step,
/// `q_{t+1} = scorecast_{t+1} + r_t(sum_{i<=t} (v_i - alpha))`, where `v_i` is
/// the miscoverage indicator (PI/PID) or a loss in `[0, 1]` (risk control).
///
/// The quantile is recomputed from the sum each step, never incremented, so a
/// saturated (infinite) quantile recovers as soon as the sum re-enters range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorIntegrator {
    saturation: Saturation,
    ledger: CoverageLedger,
    integral: f64,
    scorecast: f64,
}

impl ErrorIntegrator {
    pub fn new(alpha: f64, saturation: Saturation) -> Result<Self> {
        saturation.validate()?;
        Ok(Self {
            saturation,
            ledger: CoverageLedger::new(alpha)?,
            integral: saturation.eval(0.0, 1),
            scorecast: 0.0,
        })
    }

    /// Sets the scorecast used for the first set, `q_1 = scorecast + r_1(0)`.
    #[must_use]
    pub fn with_initial_scorecast(mut self, scorecast: f64) -> Self {
        self.scorecast = scorecast;
        self
    }

    pub fn saturation(&self) -> &Saturation {
        &self.saturation
    }

    pub fn ledger(&self) -> &CoverageLedger {
        &self.ledger
    }

    pub fn running_error_sum(&self) -> f64 {
        self.ledger.running_error_sum()
    }

    /// `r_t(E_t)` without the scorecast.
    pub fn integral_term(&self) -> f64 {
        self.integral
    }

    pub fn scorecast(&self) -> f64 {
        self.scorecast
    }

    pub fn quantile(&self) -> f64 {
        self.scorecast + self.integral
    }

    /// Slope of `r_t` at the current error sum.
    pub fn effective_rate(&self) -> f64 {
        self.saturation
            .effective_rate(self.ledger.running_error_sum(), self.ledger.t())
    }

    fn refresh(mut self, scorecast: f64) -> Self {
        self.integral = self
            .saturation
            .eval(self.ledger.running_error_sum(), self.ledger.t());
        self.scorecast = scorecast;
        self
    }

    /// PI step: `q_{t+1} = r_t(E_t)`.
    #[must_use]
    pub fn pi_step(self, err: bool) -> Self {
        self.pid_step(err, 0.0)
    }

    /// PID step. `scorecast` must be computed from data up to and including
    /// the current step only.
    #[must_use]
    pub fn pid_step(mut self, err: bool, scorecast: f64) -> Self {
        self.ledger = self.ledger.record_err(err);
        self.refresh(scorecast)
    }

    /// Risk-control step on a loss in `[0, 1]`. The caller maps very negative
    /// quantiles to the empty set and very large ones to the full set, so that
    /// saturation forces the loss to `1` or `0`.
    pub fn risk_step(mut self, loss: f64) -> Result<Self> {
        self.ledger = self.ledger.update(loss)?;
        Ok(self.refresh(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::tracker::QuantileTracker;
    use proptest::prelude::*;

    fn tan() -> Saturation {
        Saturation::tan(1.0, 0.6).unwrap()
    }

    #[test]
    fn zero_sum_gives_zero_quantile() {
        let pi = ErrorIntegrator::new(0.5, tan()).unwrap();
        assert_eq!(pi.quantile(), 0.0);
        // one miss and one cover at alpha = 0.5 cancel
        let pi = pi.pi_step(true).pi_step(false);
        assert_eq!(pi.running_error_sum(), 0.0);
        assert_eq!(pi.quantile(), 0.0);
    }

    #[test]
    fn saturation_makes_next_set_full() {
        let sat = Saturation::tan(1.0, 0.2).unwrap();
        let mut pi = ErrorIntegrator::new(0.1, sat).unwrap();
        let mut steps = 0;
        while pi.quantile().is_finite() {
            pi = pi.pi_step(true);
            steps += 1;
            assert!(steps < 100);
        }
        let t = pi.ledger().t();
        assert!(pi.running_error_sum() > sat.threshold(t, f64::INFINITY));
        assert_eq!(pi.quantile(), f64::INFINITY);
        // any finite score is covered
        assert!(!(1e300 > pi.quantile()));
    }

    #[test]
    fn constant_loss_at_alpha_freezes_quantile() {
        let mut risk = ErrorIntegrator::new(0.25, tan()).unwrap();
        for _ in 0..50 {
            risk = risk.risk_step(0.25).unwrap();
            assert_eq!(risk.quantile(), 0.0);
        }
        assert!(risk.risk_step(1.2).is_err());
    }

    #[test]
    fn miscoverage_loss_matches_pi() {
        let errs = [true, false, false, true, true, false, false, false, true, false];
        let mut pi = ErrorIntegrator::new(0.2, tan()).unwrap();
        let mut risk = ErrorIntegrator::new(0.2, tan()).unwrap();
        for &e in errs.iter().cycle().take(500) {
            pi = pi.pi_step(e);
            risk = risk.risk_step(if e { 1.0 } else { 0.0 }).unwrap();
            assert_eq!(pi.quantile(), risk.quantile());
        }
    }

    #[test]
    fn pid_recovers_three_term_update() {
        // q_{t+1} = eta g_t + r_t(sum g) + g'_t with q_hat = eta g_t + g'_t
        let eta = 0.3;
        let alpha = 0.1;
        let sat = tan();
        let mut pid = ErrorIntegrator::new(alpha, sat).unwrap();
        let mut sum = 0.0;
        let derivative = |t: u64| (t as f64 * 0.37).sin();
        let errs = [true, false, false, false, true, false, true, false, false, false];
        for (i, &e) in errs.iter().cycle().take(300).enumerate() {
            let t = i as u64 + 1;
            let g = if e { 1.0 } else { 0.0 } - alpha;
            sum += g;
            let q_hat = eta * g + derivative(t);
            pid = pid.pid_step(e, q_hat);
            let direct = eta * g + sat.eval(sum, t) + derivative(t);
            assert!(pid.quantile() == direct || (pid.quantile() - direct).abs() <= 1e-12 * (1.0 + direct.abs()), "t={t} {} vs {direct}", pid.quantile());
        }
    }

    proptest! {
        #[test]
        fn linear_integrator_is_quantile_tracker(scores in proptest::collection::vec(-2f64..2.0, 1..1000),
                                                 eta in 0.01f64..1.0, alpha in 0.05f64..0.5) {
            let mut pi = ErrorIntegrator::new(alpha, Saturation::linear(eta).unwrap()).unwrap();
            let mut p = QuantileTracker::new(alpha).unwrap();
            for (i, &s) in scores.iter().enumerate() {
                let err_pi = s > pi.quantile();
                let err_p = s > p.quantile();
                prop_assert_eq!(err_pi, err_p, "diverged at step {}", i + 1);
                pi = pi.pi_step(err_pi);
                p = p.step(err_p, eta);
                prop_assert!((pi.quantile() - p.quantile()).abs() <= 1e-9 * (i + 1) as f64);
            }
        }

        #[test]
        fn zero_scorecast_is_pi(errs in proptest::collection::vec(any::<bool>(), 1..500)) {
            let mut pi = ErrorIntegrator::new(0.1, tan()).unwrap();
            let mut pid = ErrorIntegrator::new(0.1, tan()).unwrap();
            for &e in &errs {
                pi = pi.pi_step(e);
                pid = pid.pid_step(e, 0.0);
                prop_assert_eq!(pi.quantile(), pid.quantile());
            }
        }
    }
}
