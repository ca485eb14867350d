// SPDX-License-Identifier: MIT OR Apache-2.0

//! The online evaluation loop.
//!
//! Each step after burn-in: forecast from data before `t`, read the quantile
//! from the controller, form the set, reveal `y_t`, then advance. Asymmetric
//! scores run one controller per side at half the miscoverage budget.

use conformal_pid::control::{
    csat_heuristic, rate_heuristics, AciController, ControllerMode, ErrorIntegrator, KernelIntegrator,
    Observation, QuantileTracker, Saturation,
};
use conformal_pid::data::{load_csv, synth_scores, Dataset, SynthSpec};
use conformal_pid::forecast::{OnlineForecaster, Scorecaster};
use conformal_pid::scores::score_halfline;
use conformal_pid::{
    compute_scores, coverage_indicator, invert_to_set, CoverageLedger, Forecast, IntervalSet, Quantile,
    ScoreKind, ScoreWindow, SetKind,
};
use serde::{Deserialize, Serialize};

use crate::config::{CsatSetting, DataConfig, EtaMode, RunConfig, SaturationConfig, Scale, ScoreSetup};
use crate::error::{config_err, Result};
use crate::summary::{summarize, RunSummary};

/// One evaluated step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: u64,
    pub y: f64,
    /// Both equal for a point forecast; NaN when scores are read directly.
    pub forecast_lo: f64,
    pub forecast_hi: f64,
    pub score_lo: f64,
    pub score_hi: f64,
    pub q_lo: f64,
    pub q_hi: f64,
    pub set_lo: f64,
    pub set_hi: f64,
    pub set_kind: SetKind,
    pub err: bool,
    /// Step size of the (upper-side) controller after this step's update.
    pub eta_eff: f64,
    /// `sum (err - alpha)`, or `sum (loss - alpha)` under risk control.
    pub error_sum: f64,
    /// Risk-control loss; not part of the per-step table.
    pub loss: Option<f64>,
}

/// Per-side controller trajectory, kept for the guarantee checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideTrace {
    pub alpha: f64,
    /// Scores observed during burn-in, oldest first.
    pub burn_in_scores: Vec<f64>,
    /// Controller error sum after each evaluated step.
    pub error_sums: Vec<f64>,
    /// Largest `|s_t - scorecast_t|` seen (the scorecast is 0 outside PID).
    pub max_abs_centered: f64,
    pub saturation: Option<Saturation>,
    /// Learning rate when the P controller ran with a fixed rate.
    pub fixed_eta: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub name: String,
    pub controller: ControllerMode,
    pub alpha: f64,
    pub burn_in: usize,
    pub records: Vec<StepRecord>,
    pub summary: RunSummary,
    pub sides: Vec<SideTrace>,
}

/// Result of checking the deterministic coverage bounds at every prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct GuaranteeReport {
    /// False when no bound applies (ACI, kernel weights, adaptive P rates).
    pub applicable: bool,
    pub violations: usize,
    pub first_violation: Option<u64>,
    /// Largest `|E_T| / bound(T)` over all prefixes and sides.
    pub worst_ratio: f64,
}

impl RunOutput {
    /// `|E_T| <= (b + eta)/eta` for the P controller at a fixed rate, and
    /// `|E_T| <= c h(T) + 1` for the integrators, on every side and prefix.
    pub fn verify_guarantees(&self) -> GuaranteeReport {
        let mut report = GuaranteeReport {
            applicable: false,
            violations: 0,
            first_violation: None,
            worst_ratio: 0.0,
        };
        for side in &self.sides {
            // a bound strictly above every observed deviation
            let b = side.max_abs_centered.next_up();
            let bound: Box<dyn Fn(u64) -> f64> = match (self.controller, side.fixed_eta, side.saturation) {
                (ControllerMode::P, Some(eta), _) => Box::new(move |_| (b + eta) / eta),
                (ControllerMode::Pi | ControllerMode::Pid | ControllerMode::Risk, _, Some(sat)) => {
                    Box::new(move |t| sat.threshold(t, b) + 1.0)
                }
                _ => continue,
            };
            report.applicable = true;
            for (i, e) in side.error_sums.iter().enumerate() {
                let t = i as u64 + 1;
                let limit = bound(t);
                report.worst_ratio = report.worst_ratio.max(e.abs() / limit);
                if e.abs() > limit {
                    report.violations += 1;
                    report.first_violation.get_or_insert(t);
                }
            }
        }
        report
    }
}

pub fn load_dataset(config: &RunConfig) -> Result<Dataset> {
    match &config.data {
        DataConfig::Synthetic { kind, length, noise } => {
            let scores = synth_scores(&SynthSpec {
                kind: *kind,
                length: *length,
                seed: config.seed,
                noise: *noise,
            })?;
            let mut d = Dataset::from_values(&config.name, &scores);
            d.source = "synthetic".into();
            Ok(d)
        }
        DataConfig::Csv {
            path,
            y_column,
            features,
            transform,
        } => Ok(load_csv(path, y_column, features, *transform)?),
    }
}

/// Loads the configured data and runs it.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    let data = load_dataset(config)?;
    run_on(config, &data)
}

enum Base {
    Direct,
    Point(OnlineForecaster),
    Band(OnlineForecaster, OnlineForecaster),
}

impl Base {
    fn new(config: &RunConfig) -> Result<Self> {
        let Some(spec) = &config.forecaster else {
            return Ok(Base::Direct);
        };
        Ok(if config.score == ScoreSetup::QuantileAsymmetric {
            let a = config.alpha;
            Base::Band(
                OnlineForecaster::new(spec.clone())?.with_tau(a / 2.0)?,
                OnlineForecaster::new(spec.clone())?.with_tau(1.0 - a / 2.0)?,
            )
        } else {
            Base::Point(OnlineForecaster::new(spec.clone())?)
        })
    }

    fn ready(&self, i: usize) -> bool {
        match self {
            Base::Direct => true,
            Base::Point(f) | Base::Band(f, _) => f.ready(i),
        }
    }

    fn forecast(&mut self, ys: &[f64], xs: &[Vec<f64>], i: usize) -> Result<Option<Forecast>> {
        Ok(match self {
            Base::Direct => None,
            Base::Point(f) => Some(Forecast::Point(f.predict(&ys[..i], &xs[..i], &xs[i])?)),
            Base::Band(lo, hi) => Some(Forecast::Band {
                lo: lo.predict(&ys[..i], &xs[..i], &xs[i])?,
                hi: hi.predict(&ys[..i], &xs[..i], &xs[i])?,
            }),
        })
    }
}

enum Engine {
    Tracker {
        tracker: QuantileTracker,
        fixed_eta: Option<f64>,
        last_eta: f64,
    },
    Integrator(ErrorIntegrator),
    Risk(ErrorIntegrator),
    Aci(AciController),
    Kernel(KernelIntegrator),
}

struct Side {
    engine: Engine,
    window: ScoreWindow,
    multiplier: f64,
    scores: Vec<f64>,
    score_x: Vec<Vec<f64>>,
    scorecaster: Option<Scorecaster>,
    trace: SideTrace,
}

fn resolve_saturation(config: &RunConfig, window: &ScoreWindow) -> Result<Saturation> {
    let rates = rate_heuristics(window, config.eta_multiplier)?;
    let cfg = config
        .saturation
        .ok_or_else(|| config_err(format!("controller {} needs [saturation]", config.controller)))?;
    let scale = |s: Scale, auto: f64| match s {
        Scale::Value(v) => v,
        Scale::Auto(_) => auto,
    };
    Ok(match cfg {
        SaturationConfig::Tan { k_i, c_sat } => {
            let c = match c_sat {
                CsatSetting::Value(v) => v,
                CsatSetting::Heuristic { delta, horizon } => {
                    let horizon = horizon
                        .or(config.horizon.map(|h| h as f64))
                        .ok_or_else(|| config_err("c_sat heuristic needs a horizon"))?;
                    csat_heuristic(horizon, delta)?
                }
            };
            Saturation::tan(scale(k_i, rates.k_i), c)?
        }
        SaturationConfig::Linear { eta } => Saturation::linear(scale(eta, rates.eta))?,
        SaturationConfig::DecayingLinear { eta } => Saturation::decaying_linear(scale(eta, rates.eta))?,
    })
}

impl Side {
    fn new(
        config: &RunConfig,
        alpha: f64,
        burn_scores: Vec<f64>,
        burn_x: Vec<Vec<f64>>,
        x_first: &[f64],
    ) -> Result<Self> {
        let burn_in = config.effective_burn_in();
        let mut window = ScoreWindow::new(burn_in)?;
        for &s in &burn_scores {
            window.push(s);
        }
        let mut saturation = None;
        let mut fixed_eta = None;
        let mut scorecaster = None;
        let engine = match config.controller {
            ControllerMode::P => {
                let eta = rate_heuristics(&window, config.eta_multiplier)?.eta;
                if config.eta_mode == EtaMode::Fixed {
                    fixed_eta = Some(eta);
                }
                Engine::Tracker {
                    tracker: QuantileTracker::new(alpha)?,
                    fixed_eta,
                    last_eta: eta,
                }
            }
            ControllerMode::Pi | ControllerMode::Pid => {
                let sat = resolve_saturation(config, &window)?;
                saturation = Some(sat);
                let mut integ = ErrorIntegrator::new(alpha, sat)?;
                if config.controller == ControllerMode::Pid {
                    if let Some(spec) = &config.scorecaster {
                        let mut sc = Scorecaster::new(spec.clone(), alpha)?;
                        integ = integ.with_initial_scorecast(sc.next(&burn_scores, &burn_x, x_first)?.value);
                        scorecaster = Some(sc);
                    }
                }
                Engine::Integrator(integ)
            }
            ControllerMode::Risk => {
                let sat = resolve_saturation(config, &window)?;
                saturation = Some(sat);
                Engine::Risk(ErrorIntegrator::new(alpha, sat)?)
            }
            ControllerMode::Aci | ControllerMode::AciClipped => Engine::Aci(AciController::new(
                alpha,
                config.eta_multiplier,
                &burn_scores,
                config.controller == ControllerMode::AciClipped,
            )?),
            ControllerMode::KernelPi => {
                let sat = resolve_saturation(config, &window)?;
                let kernel = config
                    .kernel
                    .clone()
                    .ok_or_else(|| config_err("controller kernel_pi needs [kernel]"))?;
                Engine::Kernel(KernelIntegrator::new(alpha, sat, kernel)?)
            }
        };
        Ok(Side {
            engine,
            window,
            multiplier: config.eta_multiplier,
            scores: burn_scores.clone(),
            score_x: burn_x,
            scorecaster,
            trace: SideTrace {
                alpha,
                burn_in_scores: burn_scores,
                error_sums: Vec::new(),
                max_abs_centered: 0.0,
                saturation,
                fixed_eta,
            },
        })
    }

    fn quantile(&self) -> f64 {
        match &self.engine {
            Engine::Tracker { tracker, .. } => tracker.quantile(),
            Engine::Integrator(i) | Engine::Risk(i) => i.quantile(),
            Engine::Aci(a) => a.quantile(),
            Engine::Kernel(k) => k.quantile(),
        }
    }

    fn eta_eff(&self) -> f64 {
        match &self.engine {
            Engine::Tracker { last_eta, .. } => *last_eta,
            Engine::Integrator(i) | Engine::Risk(i) => i.effective_rate(),
            Engine::Aci(a) => a.eta(),
            Engine::Kernel(k) => k.effective_rate(),
        }
    }

    fn error_sum(&self) -> f64 {
        match &self.engine {
            Engine::Tracker { tracker, .. } => tracker.ledger().running_error_sum(),
            Engine::Integrator(i) | Engine::Risk(i) => i.running_error_sum(),
            Engine::Aci(a) => a.ledger().running_error_sum(),
            Engine::Kernel(k) => k.ledger().running_error_sum(),
        }
    }

    fn advance(mut self, err: bool, score: f64, loss: f64, obs: Observation, x_next: Option<&[f64]>) -> Result<Self> {
        let offset = match &self.engine {
            Engine::Integrator(i) => i.scorecast(),
            _ => 0.0,
        };
        let centered = (score - offset).abs();
        if centered.is_finite() {
            self.trace.max_abs_centered = self.trace.max_abs_centered.max(centered);
        }
        self.window.push(score);
        self.scores.push(score);
        self.score_x.push(obs.x.clone());
        self.engine = match self.engine {
            Engine::Tracker {
                tracker,
                fixed_eta,
                ..
            } => {
                let eta = match fixed_eta {
                    Some(eta) => eta,
                    None => rate_heuristics(&self.window, self.multiplier)?.eta,
                };
                Engine::Tracker {
                    tracker: tracker.step(err, eta),
                    fixed_eta,
                    last_eta: eta,
                }
            }
            Engine::Integrator(integ) => {
                let cast = match (&mut self.scorecaster, x_next) {
                    (Some(sc), Some(x)) => sc.next(&self.scores, &self.score_x, x)?.value,
                    _ => 0.0,
                };
                Engine::Integrator(integ.pid_step(err, cast))
            }
            Engine::Risk(integ) => Engine::Risk(integ.risk_step(loss)?),
            Engine::Aci(aci) => Engine::Aci(aci.step(err, score)),
            Engine::Kernel(k) => Engine::Kernel(k.step(err, obs)),
        };
        self.trace.error_sums.push(self.error_sum());
        Ok(self)
    }
}

fn nan_pair() -> (f64, f64) {
    (f64::NAN, f64::NAN)
}

/// Runs `config` on an in-memory dataset. Only the first `burn_in + horizon`
/// points are used when a horizon is set.
pub fn run_on(config: &RunConfig, data: &Dataset) -> Result<RunOutput> {
    config.validate()?;
    let burn_in = config.effective_burn_in();
    let data = match config.horizon {
        Some(h) => data.truncated(burn_in + h),
        None => data.clone(),
    };
    if data.len() <= burn_in {
        return Err(config_err(format!(
            "{} points leave nothing to evaluate after a burn-in of {burn_in}",
            data.len()
        )));
    }
    let ys = data.ys();
    let xs = data.xs();
    let kind: Option<ScoreKind> = config.score.kind();
    let n_sides = config.score.sides();
    let side_alpha = config.alpha / n_sides as f64;

    let mut base = Base::new(config)?;
    let score_of = |forecast: &Option<Forecast>, y: f64| -> Result<(f64, f64)> {
        Ok(match (kind, forecast) {
            (Some(k), Some(f)) => compute_scores(k, f, y)?.bounds(),
            _ => (y, y),
        })
    };

    // burn-in: forecasts and scores, no sets
    let mut burn: Vec<Vec<f64>> = vec![Vec::new(); n_sides];
    let mut burn_x = Vec::new();
    for i in 0..burn_in {
        if !base.ready(i) {
            continue;
        }
        let f = base.forecast(&ys, &xs, i)?;
        let (lo, hi) = score_of(&f, ys[i])?;
        if n_sides == 1 {
            burn[0].push(lo);
        } else {
            burn[0].push(lo);
            burn[1].push(hi);
        }
        burn_x.push(xs[i].clone());
    }
    if burn[0].is_empty() {
        return Err(config_err("burn-in produced no scores"));
    }
    let mut sides = burn
        .into_iter()
        .map(|b| Side::new(config, side_alpha, b, burn_x.clone(), &xs[burn_in]))
        .collect::<Result<Vec<_>>>()?;

    let mut ledger = CoverageLedger::new(config.alpha)?;
    let mut records = Vec::with_capacity(ys.len() - burn_in);
    for i in burn_in..ys.len() {
        let t = data.points[i].t;
        let y = ys[i];
        let forecast = base.forecast(&ys, &xs, i)?;
        let q = if n_sides == 1 {
            Quantile::Single(sides[0].quantile())
        } else {
            Quantile::Pair {
                lo: sides[0].quantile(),
                hi: sides[1].quantile(),
            }
        };
        let set: IntervalSet = match (kind, &forecast) {
            (Some(k), Some(f)) => invert_to_set(k, f, &q)?,
            _ => score_halfline(q.bounds().0),
        };

        // y is revealed from here on
        let err = coverage_indicator(&set, y);
        let (s_lo, s_hi) = score_of(&forecast, y)?;
        let (q_lo, q_hi) = q.bounds();
        let loss = if set.is_empty() {
            1.0
        } else {
            (set.distance(y) / config.risk_scale).clamp(0.0, 1.0)
        };
        let risk = config.controller == ControllerMode::Risk;
        ledger = if risk {
            ledger.update(loss)?
        } else {
            ledger.record_err(err)
        };

        let x_next = xs.get(i + 1).map(Vec::as_slice);
        let obs = Observation {
            t,
            x: xs[i].clone(),
            y,
        };
        let side_scores = [(s_lo, q_lo), (s_hi, q_hi)];
        sides = sides
            .into_iter()
            .zip(side_scores)
            .map(|(side, (s, q))| side.advance(s > q, s, loss, obs.clone(), x_next))
            .collect::<Result<_>>()?;

        let (forecast_lo, forecast_hi) = forecast.map_or_else(nan_pair, |f| f.bounds());
        records.push(StepRecord {
            t,
            y,
            forecast_lo,
            forecast_hi,
            score_lo: s_lo,
            score_hi: s_hi,
            q_lo,
            q_hi,
            set_lo: set.lower,
            set_hi: set.upper,
            set_kind: set.kind,
            err,
            eta_eff: sides[n_sides - 1].eta_eff(),
            error_sum: ledger.running_error_sum(),
            loss: risk.then_some(loss),
        });
    }

    let summary = summarize(&records, &config.trailing_windows);
    Ok(RunOutput {
        name: config.name.clone(),
        controller: config.controller,
        alpha: config.alpha,
        burn_in,
        records,
        summary,
        sides: sides.into_iter().map(|s| s.trace).collect(),
    })
}
