// SPDX-License-Identifier: MIT OR Apache-2.0

//! Run configuration, read from a TOML file.
//!
//! ```toml
//! name = "demo"
//! alpha = 0.1
//! score = "absolute_residual"
//! controller = "pid"
//! eta_multiplier = 0.1
//! seed = 0
//!
//! [data]
//! source = "csv"
//! path = "prices.csv"
//! y_column = "close"
//! transform = "log"
//!
//! [forecaster]
//! kind = "ar"
//! p = 3
//! window = 200
//!
//! [saturation]
//! kind = "tan"
//! k_i = "auto"
//! c_sat = { delta = 0.1, horizon = 5000 }
//! ```

use std::path::{Path, PathBuf};

use conformal_pid::control::{ControllerMode, KernelSpec};
use conformal_pid::data::{SynthKind, Transform};
use conformal_pid::forecast::{ForecasterKind, ForecasterSpec};
use conformal_pid::ScoreKind;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataConfig {
    /// Synthetic score sequence; the run seed seeds the generator.
    Synthetic {
        kind: SynthKind,
        length: usize,
        noise: f64,
    },
    Csv {
        path: PathBuf,
        y_column: String,
        #[serde(default)]
        features: Vec<String>,
        #[serde(default)]
        transform: Transform,
    },
}

/// How responses become scores. `direct` treats the response column as the
/// score sequence itself; the set is then the half-line `(-inf, q]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreSetup {
    Direct,
    AbsoluteResidual,
    SignedResidualAsymmetric,
    QuantileAsymmetric,
}

impl ScoreSetup {
    pub fn kind(self) -> Option<ScoreKind> {
        match self {
            ScoreSetup::Direct => None,
            ScoreSetup::AbsoluteResidual => Some(ScoreKind::AbsoluteResidual),
            ScoreSetup::SignedResidualAsymmetric => Some(ScoreKind::SignedResidualAsymmetric),
            ScoreSetup::QuantileAsymmetric => Some(ScoreKind::QuantileAsymmetric),
        }
    }

    pub fn sides(self) -> usize {
        match self.kind() {
            Some(k) if k.is_asymmetric() => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Auto {
    Auto,
}

/// A constant, or `"auto"` to take it from the burn-in score scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scale {
    Value(f64),
    Auto(Auto),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CsatSetting {
    Value(f64),
    /// From the horizon heuristic. `horizon` defaults to the run's horizon cap.
    Heuristic {
        delta: f64,
        #[serde(default)]
        horizon: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SaturationConfig {
    Tan { k_i: Scale, c_sat: CsatSetting },
    /// `eta = "auto"` means `eta_multiplier` times the burn-in score scale.
    Linear { eta: Scale },
    DecayingLinear { eta: Scale },
}

/// Learning rate of the P controller: `eta_multiplier` times the trailing
/// score max, either refreshed every step or frozen at the end of burn-in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaMode {
    #[default]
    Adaptive,
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Steps,
    Summary,
    Plots,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_windows() -> Vec<usize> {
    vec![10, 50]
}

fn default_formats() -> Vec<OutputFormat> {
    vec![OutputFormat::Steps, OutputFormat::Summary, OutputFormat::Plots]
}

fn default_risk_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub name: String,
    pub data: DataConfig,
    pub score: ScoreSetup,
    #[serde(default)]
    pub forecaster: Option<ForecasterSpec>,
    /// Used by the PID controller only; without one the scorecast is 0.
    #[serde(default)]
    pub scorecaster: Option<ForecasterSpec>,
    pub controller: ControllerMode,
    #[serde(default)]
    pub saturation: Option<SaturationConfig>,
    #[serde(default)]
    pub kernel: Option<KernelSpec>,
    pub alpha: f64,
    /// P: `eta = eta_multiplier * B_t`. ACI: `eta = eta_multiplier`.
    pub eta_multiplier: f64,
    #[serde(default)]
    pub eta_mode: EtaMode,
    /// Burn-in length, also the trailing window for the score scale. Defaults
    /// to the forecaster's minimum history plus the scorecaster's (at least 1).
    #[serde(default)]
    pub burn_in: Option<usize>,
    /// Maximum number of evaluated steps after burn-in.
    #[serde(default)]
    pub horizon: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Distance scale of the risk-control loss `clamp(dist(y, C) / scale, 0, 1)`.
    #[serde(default = "default_risk_scale")]
    pub risk_scale: f64,
    #[serde(default = "default_windows")]
    pub trailing_windows: Vec<usize>,
    #[serde(default = "default_formats")]
    pub formats: Vec<OutputFormat>,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    /// Reads a config file. A relative CSV path or output directory is taken
    /// relative to the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text).map_err(|source| HarnessError::Toml {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        if let DataConfig::Csv { path: p, .. } = &mut cfg.data {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if cfg.output_dir.is_relative() {
            cfg.output_dir = base.join(&cfg.output_dir);
        }
        Ok(cfg)
    }

    fn forecaster_min(&self) -> usize {
        self.forecaster.as_ref().map_or(0, |f| f.min_history())
    }

    fn scorecaster_min(&self) -> usize {
        match (&self.scorecaster, self.controller) {
            (Some(s), ControllerMode::Pid) => s.min_history(),
            _ => 0,
        }
    }

    pub fn effective_burn_in(&self) -> usize {
        self.burn_in
            .unwrap_or_else(|| self.forecaster_min() + self.scorecaster_min().max(1))
    }

    /// Checks cross-field consistency that the type system cannot express.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(config_err(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if !(self.eta_multiplier > 0.0 && self.eta_multiplier.is_finite()) {
            return Err(config_err(format!(
                "eta_multiplier must be positive, got {}",
                self.eta_multiplier
            )));
        }
        if !(self.risk_scale > 0.0 && self.risk_scale.is_finite()) {
            return Err(config_err("risk_scale must be positive"));
        }
        if self.trailing_windows.contains(&0) {
            return Err(config_err("trailing windows must be positive"));
        }
        if let DataConfig::Synthetic { .. } = self.data {
            if self.score != ScoreSetup::Direct {
                return Err(config_err("synthetic data are scores; use score = \"direct\""));
            }
        }
        match (self.score, &self.forecaster) {
            (ScoreSetup::Direct, Some(_)) => {
                return Err(config_err("score = \"direct\" takes no forecaster"))
            }
            (ScoreSetup::Direct, None) => {}
            (_, None) => return Err(config_err("this score kind needs a [forecaster]")),
            (setup, Some(f)) => {
                f.validate()?;
                let quantile_tau = match f.kind {
                    ForecasterKind::L1Quantile { tau, .. } => Some(tau),
                    _ => None,
                };
                match (setup, quantile_tau) {
                    (ScoreSetup::QuantileAsymmetric, Some(None)) => {}
                    (ScoreSetup::QuantileAsymmetric, _) => {
                        return Err(config_err(
                            "quantile_asymmetric needs an l1_quantile forecaster without tau",
                        ))
                    }
                    (_, Some(None)) => {
                        return Err(config_err("a point forecast from l1_quantile needs an explicit tau"))
                    }
                    _ => {}
                }
            }
        }
        if let Some(s) = &self.scorecaster {
            s.validate()?;
        }
        if self.controller.uses_saturation() && self.saturation.is_none() {
            return Err(config_err(format!("controller {} needs [saturation]", self.controller)));
        }
        if self.controller == ControllerMode::KernelPi {
            match &self.kernel {
                Some(k) => k.validate()?,
                None => return Err(config_err("controller kernel_pi needs [kernel]")),
            }
        }
        if self.controller == ControllerMode::Risk && self.score.sides() != 1 {
            return Err(config_err("risk control needs a single-sided score"));
        }
        let burn_in = self.effective_burn_in();
        if burn_in <= self.forecaster_min() {
            return Err(config_err(format!(
                "burn_in {burn_in} leaves no scores after the forecaster's {} warm-up points",
                self.forecaster_min()
            )));
        }
        if let Some(SaturationConfig::Tan {
            c_sat: CsatSetting::Heuristic { horizon: None, .. },
            ..
        }) = self.saturation
        {
            if self.horizon.is_none() {
                return Err(config_err("c_sat heuristic needs a horizon, in [saturation] or at top level"));
            }
        }
        Ok(())
    }
}
