// SPDX-License-Identifier: MIT OR Apache-2.0

use conformal_pid::control::{
    beta_t, csat_heuristic, AciController, ErrorIntegrator, QuantileTracker, Saturation,
};
use conformal_pid::data::{synth_scores, SynthKind, SynthSpec};
use conformal_pid::scores::score_halfline;
use conformal_pid::IntervalSet;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Cauchy, Distribution};

fn synth(kind: SynthKind, seed: u64, n: usize) -> Vec<f64> {
    synth_scores(&SynthSpec {
        kind,
        length: n,
        seed,
        noise: 0.5,
    })
    .unwrap()
}

#[test]
fn tracker_bound_holds_against_adversary() {
    for &eta in &[0.05, 0.1, 0.5] {
        for &alpha in &[0.1, 0.2] {
            let mut p = QuantileTracker::new(alpha).unwrap();
            let bound = (1.0 + eta) / eta;
            for _ in 0..5000 {
                let s = (p.quantile() + 0.01).clamp(-1.0, 1.0);
                let err = s > p.quantile();
                p = p.step(err, eta);
                assert!(p.ledger().running_error_sum().abs() <= bound);
            }
        }
    }
}

#[test]
fn tan_integrator_bound_with_heavy_tails() {
    let n = 3000;
    let c_sat = csat_heuristic(n as f64, 0.1).unwrap();
    let sat = Saturation::tan(1.0, c_sat).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let noise = Cauchy::new(0.0, 1.0).unwrap();
    for kind in [SynthKind::Iid, SynthKind::Increasing, SynthKind::ChangepointMix] {
        let scores: Vec<f64> = synth(kind, 3, n)
            .into_iter()
            .map(|s| s + noise.sample(&mut rng))
            .collect();
        let mut pi = ErrorIntegrator::new(0.1, sat).unwrap();
        for (i, &s) in scores.iter().enumerate() {
            let t = i as u64 + 1;
            let before = pi.running_error_sum();
            let err = s > pi.quantile();
            if t > 1 && before > sat.threshold(t - 1, f64::INFINITY) {
                assert!(!err, "saturated high at t={t} but still missed");
            }
            if t > 1 && before < -sat.threshold(t - 1, f64::INFINITY) {
                assert!(err, "saturated low at t={t} but still covered");
            }
            pi = pi.pi_step(err);
            assert!(pi.running_error_sum().abs() <= sat.threshold(t, f64::INFINITY) + 1.0);
        }
    }
}

#[test]
fn risk_bound_with_distance_loss() {
    let n = 5000;
    let alpha = 0.1;
    let sat = Saturation::tan(1.0, csat_heuristic(n as f64, 0.1).unwrap()).unwrap();
    let ys = synth(SynthKind::ChangepointMix, 9, n);
    let mut risk = ErrorIntegrator::new(alpha, sat).unwrap();
    for (i, &y) in ys.iter().enumerate() {
        let t = i as u64 + 1;
        // set around a forecast of 0
        let q = risk.quantile();
        let set = if q == f64::INFINITY {
            IntervalSet::full()
        } else {
            IntervalSet::from_bounds(-q, q)
        };
        let loss = if set.is_empty() {
            1.0
        } else {
            set.distance(y).clamp(0.0, 1.0)
        };
        risk = risk.risk_step(loss).unwrap();
        assert!(risk.running_error_sum().abs() <= sat.threshold(t, f64::INFINITY) + 1.0);
    }
}

#[test]
fn aci_is_tracker_on_secondary_scores() {
    let scores = synth(SynthKind::ChangepointMix, 17, 2100);
    let (calib, live) = scores.split_at(100);
    let (alpha, eta) = (0.1, 0.1);
    let mut aci = AciController::plain(alpha, eta, calib).unwrap();
    let mut tracker = QuantileTracker::with_initial(alpha, 1.0 - alpha).unwrap();
    let mut history = calib.to_vec();
    for &s in live {
        let aci_err = !score_halfline(aci.quantile()).contains(s);
        let b = beta_t(&history, s).unwrap();
        let p_err = b > tracker.quantile();
        assert_eq!(aci_err, p_err);
        assert_eq!(aci.level().to_bits(), tracker.quantile().to_bits());
        aci = aci.step(aci_err, s);
        tracker = tracker.step(p_err, eta);
        history.push(s);
    }
}

#[test]
fn pid_errors_invariant_to_common_shift() {
    let scores = synth(SynthKind::Increasing, 2, 800);
    let sat = Saturation::tan(1.0, 0.6).unwrap();
    let run = |shift: f64| {
        let mut pid = ErrorIntegrator::new(0.1, sat).unwrap().with_initial_scorecast(shift);
        let mut errs = Vec::new();
        for (i, &s) in scores.iter().enumerate() {
            let err = s + shift > pid.quantile();
            errs.push(err);
            // a scorecast that is any function of the past: the latest score
            let cast = scores[i] + shift;
            pid = pid.pid_step(err, cast);
        }
        errs
    };
    let base = run(0.0);
    for shift in [0.5, -3.0, 16.0] {
        assert_eq!(run(shift), base);
    }
}

#[test]
fn tan_increment_grows_with_error_sum() {
    let sat = Saturation::tan(2.0, 0.8).unwrap();
    let t = 40;
    let limit = sat.threshold(t, f64::INFINITY);
    let mut prev = 0.0;
    for k in 0..200 {
        let e = limit * f64::from(k) / 200.0;
        let step = (sat.eval(e + 0.9, t) - sat.eval(e, t)).abs();
        if e + 0.9 < limit {
            assert!(step >= prev);
            prev = step;
        }
    }
}
