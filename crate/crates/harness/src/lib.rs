// SPDX-License-Identifier: MIT OR Apache-2.0

//! Backtesting harness for online conformal controllers: load or generate a
//! series, run a controller over it, and write per-step records, a summary
//! and plot data.

pub mod config;
pub mod emit;
pub mod error;
pub mod runner;
pub mod summary;
pub mod sweep;

pub use config::RunConfig;
pub use error::{HarnessError, Result};
pub use runner::{run, run_on, RunOutput, StepRecord};
pub use summary::{summarize, RunSummary};
pub use sweep::{sweep, sweep_on, SweepCell};
