// SPDX-License-Identifier: MIT OR Apache-2.0

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("quantile level {0} is outside the open interval (0, 1)")]
    InvalidLevel(f64),

    #[error("loss or error value {0} is outside [0, 1]")]
    ValueOutOfRange(f64),

    #[error("{0} requires a nonempty history")]
    EmptyHistory(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("forecast arity does not match score kind {kind}: {detail}")]
    ArityMismatch { kind: &'static str, detail: String },

    #[error("series too short: need at least {needed} values, got {got}")]
    SeriesTooShort { needed: usize, got: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("column `{0}` not found")]
    MissingColumn(String),

    #[error("nonpositive value {value} at row {row} cannot be log-transformed")]
    NonPositiveLog { row: usize, value: f64 },

    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
