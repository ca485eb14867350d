// SPDX-License-Identifier: MIT OR Apache-2.0

//! Output files: the per-step table, the summary document and plot data.
//!
//! Numbers are written with Rust's shortest round-trip formatting (`inf`,
//! `-inf` and `NaN` included), so reading a table back gives the same bits.

use std::fs;
use std::path::{Path, PathBuf};

use conformal_pid::SetKind;
use serde::{Deserialize, Serialize};

use crate::config::OutputFormat;
use crate::error::{HarnessError, Result};
use crate::runner::{RunOutput, StepRecord};
use crate::summary::RunSummary;

pub const STEPS_HEADER: [&str; 14] = [
    "t",
    "y",
    "forecast_lo",
    "forecast_hi",
    "score_lo",
    "score_hi",
    "q_lo",
    "q_hi",
    "set_lo",
    "set_hi",
    "set_kind",
    "err",
    "eta_eff",
    "error_sum",
];

pub const STEPS_FILE: &str = "steps.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const COVERAGE_PLOT_FILE: &str = "plotdata_coverage.csv";
pub const SETS_PLOT_FILE: &str = "plotdata_sets.csv";
pub const RISK_FILE: &str = "risk.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryDocument {
    pub name: String,
    pub controller: String,
    pub alpha: f64,
    pub burn_in: usize,
    #[serde(flatten)]
    pub summary: RunSummary,
}

fn num(v: f64) -> String {
    v.to_string()
}

pub fn write_steps(records: &[StepRecord], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(STEPS_HEADER)?;
    for r in records {
        w.write_record([
            r.t.to_string(),
            num(r.y),
            num(r.forecast_lo),
            num(r.forecast_hi),
            num(r.score_lo),
            num(r.score_hi),
            num(r.q_lo),
            num(r.q_hi),
            num(r.set_lo),
            num(r.set_hi),
            r.set_kind.as_str().to_string(),
            u8::from(r.err).to_string(),
            num(r.eta_eff),
            num(r.error_sum),
        ])?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn read_steps(path: &Path) -> Result<Vec<StepRecord>> {
    let mut reader = csv::Reader::from_path(path)?;
    let header = reader.headers()?.clone();
    if header.iter().ne(STEPS_HEADER) {
        return Err(HarnessError::Record {
            line: 1,
            detail: format!("unexpected header {header:?}"),
        });
    }
    let mut out = Vec::new();
    for (k, row) in reader.records().enumerate() {
        let row = row?;
        let line = k + 2;
        let bad = |detail: String| HarnessError::Record { line, detail };
        let f = |i: usize| -> Result<f64> {
            row[i]
                .parse::<f64>()
                .map_err(|_| bad(format!("column {} is not a number: {:?}", STEPS_HEADER[i], &row[i])))
        };
        out.push(StepRecord {
            t: row[0].parse().map_err(|_| bad(format!("bad t {:?}", &row[0])))?,
            y: f(1)?,
            forecast_lo: f(2)?,
            forecast_hi: f(3)?,
            score_lo: f(4)?,
            score_hi: f(5)?,
            q_lo: f(6)?,
            q_hi: f(7)?,
            set_lo: f(8)?,
            set_hi: f(9)?,
            set_kind: SetKind::parse(&row[10]).ok_or_else(|| bad(format!("bad set kind {:?}", &row[10])))?,
            err: match &row[11] {
                "0" => false,
                "1" => true,
                other => return Err(bad(format!("bad err {other:?}"))),
            },
            eta_eff: f(12)?,
            error_sum: f(13)?,
            loss: None,
        });
    }
    Ok(out)
}

pub fn summary_document(output: &RunOutput) -> SummaryDocument {
    SummaryDocument {
        name: output.name.clone(),
        controller: output.controller.name().to_string(),
        alpha: output.alpha,
        burn_in: output.burn_in,
        summary: output.summary.clone(),
    }
}

pub fn write_summary(output: &RunOutput, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(&summary_document(output))?;
    fs::write(path, text + "\n").map_err(|e| HarnessError::io(path, e))
}

pub fn read_summary(path: &Path) -> Result<SummaryDocument> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_coverage_plot(output: &RunOutput, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let series = &output.summary.trailing_coverage;
    let mut header = vec!["t".to_string()];
    header.extend(series.iter().map(|s| format!("coverage_w{}", s.window)));
    w.write_record(&header)?;
    for (k, r) in output.records.iter().enumerate() {
        let mut row = vec![r.t.to_string()];
        row.extend(series.iter().map(|s| num(s.values[k])));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn write_sets_plot(records: &[StepRecord], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "y", "set_lo", "set_hi", "set_kind"])?;
    for r in records {
        w.write_record([
            r.t.to_string(),
            num(r.y),
            num(r.set_lo),
            num(r.set_hi),
            r.set_kind.as_str().to_string(),
        ])?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

fn write_risk(records: &[StepRecord], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "loss"])?;
    for r in records {
        if let Some(loss) = r.loss {
            w.write_record([r.t.to_string(), num(loss)])?;
        }
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

/// Writes the requested formats into `dir` and returns the files written.
/// An empty format list writes nothing and does not touch `dir`.
pub fn emit(output: &RunOutput, dir: &Path, formats: &[OutputFormat]) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    if formats.is_empty() {
        return Ok(written);
    }
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    for format in formats {
        match format {
            OutputFormat::Steps => {
                let p = dir.join(STEPS_FILE);
                write_steps(&output.records, &p)?;
                written.push(p);
                if output.records.iter().any(|r| r.loss.is_some()) {
                    let p = dir.join(RISK_FILE);
                    write_risk(&output.records, &p)?;
                    written.push(p);
                }
            }
            OutputFormat::Summary => {
                let p = dir.join(SUMMARY_FILE);
                write_summary(output, &p)?;
                written.push(p);
            }
            OutputFormat::Plots => {
                let p = dir.join(COVERAGE_PLOT_FILE);
                write_coverage_plot(output, &p)?;
                written.push(p);
                let p = dir.join(SETS_PLOT_FILE);
                write_sets_plot(&output.records, &p)?;
                written.push(p);
            }
        }
    }
    Ok(written)
}
