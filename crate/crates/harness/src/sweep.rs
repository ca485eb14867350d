// SPDX-License-Identifier: MIT OR Apache-2.0

//! Grids of runs over controllers and rate multipliers.

use std::path::Path;

use conformal_pid::control::ControllerMode;
use conformal_pid::data::Dataset;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::emit::emit;
use crate::error::{config_err, HarnessError, Result};
use crate::runner::{load_dataset, run_on};
use crate::summary::RunSummary;

#[derive(Debug, Clone)]
pub struct SweepCell {
    pub controller: ControllerMode,
    pub multiplier: f64,
    /// The cell's summary, or the error that stopped it.
    pub outcome: std::result::Result<RunSummary, String>,
}

pub fn cell_dir_name(controller: ControllerMode, multiplier: f64) -> String {
    format!("{}_{}", controller.name(), multiplier)
}

/// The base config with one cell's controller and multiplier substituted.
pub fn cell_config(base: &RunConfig, controller: ControllerMode, multiplier: f64) -> RunConfig {
    let mut cfg = base.clone();
    cfg.controller = controller;
    cfg.eta_multiplier = multiplier;
    cfg.output_dir = base.output_dir.join(cell_dir_name(controller, multiplier));
    cfg
}

fn run_cell(base: &RunConfig, data: &Dataset, controller: ControllerMode, multiplier: f64, write: bool) -> SweepCell {
    let cfg = cell_config(base, controller, multiplier);
    let outcome = run_on(&cfg, data).and_then(|out| {
        if write {
            emit(&out, &cfg.output_dir, &cfg.formats)?;
        }
        Ok(out.summary)
    });
    if let Err(e) = &outcome {
        log::warn!("sweep cell {} failed: {e}", cell_dir_name(controller, multiplier));
    }
    SweepCell {
        controller,
        multiplier,
        outcome: outcome.map_err(|e| e.to_string()),
    }
}

/// Runs every (controller, multiplier) pair in parallel on `data`. Cells are
/// returned in controller-major order. A failing cell is recorded and the
/// rest of the grid still runs.
pub fn sweep_on(
    base: &RunConfig,
    data: &Dataset,
    rates: &[f64],
    controllers: &[ControllerMode],
    write: bool,
) -> Result<Vec<SweepCell>> {
    if rates.is_empty() || controllers.is_empty() {
        return Err(config_err("a sweep needs at least one rate and one controller"));
    }
    let grid: Vec<(ControllerMode, f64)> = controllers
        .iter()
        .flat_map(|&c| rates.iter().map(move |&r| (c, r)))
        .collect();
    Ok(grid
        .par_iter()
        .map(|&(c, r)| run_cell(base, data, c, r, write))
        .collect())
}

pub fn sweep(base: &RunConfig, rates: &[f64], controllers: &[ControllerMode]) -> Result<Vec<SweepCell>> {
    let data = load_dataset(base)?;
    let cells = sweep_on(base, &data, rates, controllers, true)?;
    if !base.formats.is_empty() {
        write_table(&cells, &base.output_dir.join("sweep.csv"))?;
    }
    Ok(cells)
}

/// One row per cell with the headline metrics.
pub fn write_table(cells: &[SweepCell], path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "controller",
        "multiplier",
        "status",
        "marginal_coverage",
        "average_size",
        "fraction_infinite",
        "fraction_empty",
        "longest_miscoverage_run",
    ])?;
    for cell in cells {
        let mut row = vec![cell.controller.name().to_string(), cell.multiplier.to_string()];
        match &cell.outcome {
            Ok(s) => row.extend([
                "ok".to_string(),
                s.marginal_coverage.to_string(),
                s.average_size.map_or_else(String::new, |v| v.to_string()),
                s.fraction_infinite.to_string(),
                s.fraction_empty.to_string(),
                s.longest_miscoverage_run.to_string(),
            ]),
            Err(e) => {
                row.push(format!("error: {e}"));
                row.extend(std::iter::repeat_n(String::new(), 5));
            }
        }
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}
