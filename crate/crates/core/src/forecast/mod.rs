// SPDX-License-Identifier: MIT OR Apache-2.0

//! Base forecasters and scorecasters.

pub mod ar;
pub mod l1;
pub mod scorecast;
pub mod theta;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use ar::{ar_fit, ar_forecast, ar_predict};
pub use l1::{l1_objective, l1_quantile_fit, l1_quantile_fit_with_budget, sample_quantile};
pub use scorecast::{scorecast, Scorecast, Scorecaster};
pub use theta::theta_forecast;

/// Fitted linear model. For AR fits the coefficients are lag weights, most
/// recent first; for quantile fits they act on the raw feature row.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FitState {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub residual_scale: f64,
    pub iterations: usize,
    /// Column means used for standardization (empty when not standardized).
    pub feature_means: Vec<f64>,
    pub feature_scales: Vec<f64>,
}

impl FitState {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.intercept
            + self
                .coefficients
                .iter()
                .zip(row)
                .map(|(c, x)| c * x)
                .sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ForecasterKind {
    Ar {
        p: usize,
    },
    Theta {
        theta: f64,
    },
    Persistence,
    /// Quantile regression on `lags` past values plus the current covariates.
    /// `tau` left unset is filled in by the caller (`1 - alpha` when used as
    /// a scorecaster, `alpha/2` and `1 - alpha/2` for a quantile band).
    L1Quantile {
        lambda: f64,
        #[serde(default)]
        tau: Option<f64>,
        lags: usize,
    },
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecasterSpec {
    #[serde(flatten)]
    pub kind: ForecasterKind,
    /// Number of most recent points used for fitting.
    pub window: usize,
    #[serde(default = "one")]
    pub refit_every: usize,
}

impl ForecasterSpec {
    pub fn new(kind: ForecasterKind, window: usize) -> Self {
        ForecasterSpec {
            kind,
            window,
            refit_every: 1,
        }
    }

    /// Fewest past points needed before a forecast can be made.
    pub fn min_history(&self) -> usize {
        match self.kind {
            ForecasterKind::Ar { p } => p + 2,
            ForecasterKind::Theta { .. } => 4,
            ForecasterKind::Persistence => 1,
            ForecasterKind::L1Quantile { lags, .. } => lags + 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            ForecasterKind::Ar { p: 0 } => {
                return Err(Error::InvalidParameter("AR order must be at least 1".into()))
            }
            ForecasterKind::Theta { theta } if !(theta >= 1.0) => {
                return Err(Error::InvalidParameter(format!("theta must be >= 1, got {theta}")))
            }
            ForecasterKind::L1Quantile { lambda, tau, .. } => {
                if !(lambda >= 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "penalty must be nonnegative, got {lambda}"
                    )));
                }
                if let Some(tau) = tau {
                    if !(tau > 0.0 && tau < 1.0) {
                        return Err(Error::InvalidLevel(tau));
                    }
                }
            }
            _ => {}
        }
        if self.window < self.min_history() {
            return Err(Error::InvalidParameter(format!(
                "window {} is below the minimum history {}",
                self.window,
                self.min_history()
            )));
        }
        if self.refit_every == 0 {
            return Err(Error::InvalidParameter("refit_every must be at least 1".into()));
        }
        Ok(())
    }

    pub fn is_quantile(&self) -> bool {
        matches!(self.kind, ForecasterKind::L1Quantile { .. })
    }
}

/// Builds the lagged design for quantile regression over `ys[..]`.
/// Row for target index `i` is `ys[i-1], ..., ys[i-lags]` followed by `xs[i]`.
pub fn lagged_design(ys: &[f64], xs: &[Vec<f64>], lags: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut rows = Vec::with_capacity(ys.len().saturating_sub(lags));
    let mut targets = Vec::with_capacity(rows.capacity());
    for i in lags..ys.len() {
        let mut row: Vec<f64> = (1..=lags).map(|k| ys[i - k]).collect();
        if let Some(x) = xs.get(i) {
            row.extend_from_slice(x);
        }
        rows.push(row);
        targets.push(ys[i]);
    }
    (rows, targets)
}

fn next_row(ys: &[f64], x_next: &[f64], lags: usize) -> Vec<f64> {
    let mut row: Vec<f64> = (1..=lags).map(|k| ys[ys.len() - k]).collect();
    row.extend_from_slice(x_next);
    row
}

/// A forecaster that is refit on a trailing window at a fixed cadence.
///
/// `predict` is handed the full past (`ys`, and covariates `xs` aligned with
/// it) plus the covariates of the point being forecast. Nothing at or after
/// the forecast time is ever passed in.
#[derive(Debug, Clone)]
pub struct OnlineForecaster {
    spec: ForecasterSpec,
    tau: Option<f64>,
    fit: Option<FitState>,
    since_fit: usize,
}

impl OnlineForecaster {
    pub fn new(spec: ForecasterSpec) -> Result<Self> {
        spec.validate()?;
        let tau = match spec.kind {
            ForecasterKind::L1Quantile { tau, .. } => tau,
            _ => None,
        };
        Ok(OnlineForecaster {
            spec,
            tau,
            fit: None,
            since_fit: 0,
        })
    }

    /// Sets the quantile level for an `l1_quantile` forecaster.
    pub fn with_tau(mut self, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau < 1.0) {
            return Err(Error::InvalidLevel(tau));
        }
        self.tau = Some(tau);
        Ok(self)
    }

    pub fn spec(&self) -> &ForecasterSpec {
        &self.spec
    }

    pub fn last_fit(&self) -> Option<&FitState> {
        self.fit.as_ref()
    }

    pub fn ready(&self, history_len: usize) -> bool {
        history_len >= self.spec.min_history()
    }

    pub fn predict(&mut self, ys: &[f64], xs: &[Vec<f64>], x_next: &[f64]) -> Result<f64> {
        let needed = self.spec.min_history();
        if ys.len() < needed {
            return Err(Error::SeriesTooShort {
                needed,
                got: ys.len(),
            });
        }
        let start = ys.len().saturating_sub(self.spec.window);
        let ys_w = &ys[start..];
        let xs_w = if xs.len() == ys.len() { &xs[start..] } else { &[][..] };
        match self.spec.kind.clone() {
            ForecasterKind::Persistence => Ok(ys[ys.len() - 1]),
            ForecasterKind::Theta { theta } => theta_forecast(ys_w, theta),
            ForecasterKind::Ar { p } => {
                if self.needs_refit() {
                    self.store(ar_fit(ys_w, p)?);
                }
                self.since_fit += 1;
                ar_forecast(self.fit.as_ref().expect("fit stored above"), ys)
            }
            ForecasterKind::L1Quantile { lambda, lags, .. } => {
                let tau = self.tau.ok_or_else(|| {
                    Error::InvalidParameter("quantile forecaster has no tau set".into())
                })?;
                if self.needs_refit() {
                    let (rows, targets) = lagged_design(ys_w, xs_w, lags);
                    self.store(l1_quantile_fit(&rows, &targets, tau, lambda)?);
                }
                self.since_fit += 1;
                let fit = self.fit.as_ref().expect("fit stored above");
                let row = if xs_w.is_empty() {
                    next_row(ys, &[], lags)
                } else {
                    next_row(ys, x_next, lags)
                };
                if row.len() != fit.coefficients.len() {
                    return Err(Error::DimensionMismatch(format!(
                        "forecast row has {} features, fit has {}",
                        row.len(),
                        fit.coefficients.len()
                    )));
                }
                Ok(fit.predict_row(&row))
            }
        }
    }

    fn needs_refit(&self) -> bool {
        self.fit.is_none() || self.since_fit >= self.spec.refit_every
    }

    fn store(&mut self, fit: FitState) {
        self.fit = Some(fit);
        self.since_fit = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_parses_flat_tables() {
        let spec: ForecasterSpec = toml::from_str("kind = \"ar\"\np = 3\nwindow = 50\n").unwrap();
        assert_eq!(spec.kind, ForecasterKind::Ar { p: 3 });
        assert_eq!(spec.refit_every, 1);
        let spec: ForecasterSpec =
            toml::from_str("kind = \"l1_quantile\"\nlambda = 10.0\nlags = 3\nwindow = 40\nrefit_every = 5\n").unwrap();
        assert_eq!(
            spec.kind,
            ForecasterKind::L1Quantile {
                lambda: 10.0,
                tau: None,
                lags: 3
            }
        );
        assert_eq!(spec.refit_every, 5);
    }

    #[test]
    fn validation() {
        assert!(ForecasterSpec::new(ForecasterKind::Ar { p: 0 }, 10).validate().is_err());
        assert!(ForecasterSpec::new(ForecasterKind::Ar { p: 3 }, 4).validate().is_err());
        assert!(ForecasterSpec::new(ForecasterKind::Theta { theta: 0.5 }, 10).validate().is_err());
        let bad_tau = ForecasterKind::L1Quantile {
            lambda: 1.0,
            tau: Some(1.0),
            lags: 1,
        };
        assert!(ForecasterSpec::new(bad_tau, 10).validate().is_err());
        assert!(ForecasterSpec::new(ForecasterKind::Persistence, 1).validate().is_ok());
    }

    #[test]
    fn persistence_returns_last_value() {
        let mut f = OnlineForecaster::new(ForecasterSpec::new(ForecasterKind::Persistence, 1)).unwrap();
        assert_eq!(f.predict(&[1.0, 4.0, -2.5], &[], &[]).unwrap(), -2.5);
        assert!(f.predict(&[], &[], &[]).is_err());
    }

    #[test]
    fn ar_refit_cadence() {
        let mut spec = ForecasterSpec::new(ForecasterKind::Ar { p: 1 }, 30);
        spec.refit_every = 3;
        let mut f = OnlineForecaster::new(spec).unwrap();
        let mut ys: Vec<f64> = vec![1.0];
        for _ in 0..20 {
            let last = ys[ys.len() - 1];
            ys.push(0.5 * last + 1.0);
        }
        let first = f.predict(&ys[..10], &[], &[]).unwrap();
        let fit_a = f.last_fit().unwrap().clone();
        f.predict(&ys[..11], &[], &[]).unwrap();
        f.predict(&ys[..12], &[], &[]).unwrap();
        assert_eq!(f.last_fit().unwrap(), &fit_a);
        assert!((first - ys[10]).abs() < 1e-8);
    }

    #[test]
    fn lagged_design_layout() {
        let ys = [1.0, 2.0, 3.0, 4.0];
        let xs = vec![vec![10.0], vec![20.0], vec![30.0], vec![40.0]];
        let (rows, targets) = lagged_design(&ys, &xs, 2);
        assert_eq!(rows, vec![vec![2.0, 1.0, 30.0], vec![3.0, 2.0, 40.0]]);
        assert_eq!(targets, vec![3.0, 4.0]);
    }

    #[test]
    fn quantile_forecaster_needs_tau() {
        let spec = ForecasterSpec::new(
            ForecasterKind::L1Quantile {
                lambda: 1.0,
                tau: None,
                lags: 1,
            },
            10,
        );
        let ys: Vec<f64> = (0..10).map(f64::from).collect();
        let mut f = OnlineForecaster::new(spec.clone()).unwrap();
        assert!(f.predict(&ys, &[], &[]).is_err());
        let mut f = OnlineForecaster::new(spec).unwrap().with_tau(0.5).unwrap();
        assert!(f.predict(&ys, &[], &[]).unwrap().is_finite());
    }
}
