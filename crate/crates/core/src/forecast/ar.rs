// SPDX-License-Identifier: MIT OR Apache-2.0

//! Autoregressive model with intercept, fit by least squares.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::forecast::FitState;

/// Fits `y_t = c + sum_k phi_k y_{t-k}` for `k = 1..=p`. Coefficients are
/// ordered most-recent-lag first. A rank-deficient design (a constant series,
/// say) gets the minimum-norm least-squares solution.
pub fn ar_fit(series: &[f64], p: usize) -> Result<FitState> {
    if p == 0 {
        return Err(Error::InvalidParameter("AR order must be at least 1".into()));
    }
    if series.len() < p + 2 {
        return Err(Error::SeriesTooShort {
            needed: p + 2,
            got: series.len(),
        });
    }
    let rows = series.len() - p;
    let design = DMatrix::from_fn(rows, p + 1, |r, c| {
        if c == 0 {
            1.0
        } else {
            series[p + r - c]
        }
    });
    let target = DVector::from_iterator(rows, series[p..].iter().copied());

    let svd = design.clone().svd(true, true);
    let largest = svd.singular_values.max();
    let tol = largest * (rows.max(p + 1) as f64) * f64::EPSILON;
    let solution = svd
        .solve(&target, tol)
        .map_err(|e| Error::InvalidParameter(format!("AR least squares failed: {e}")))?;

    let residual = &target - &design * &solution;
    let residual_scale = (residual.norm_squared() / rows as f64).sqrt();
    Ok(FitState {
        intercept: solution[0],
        coefficients: solution.iter().skip(1).copied().collect(),
        residual_scale,
        iterations: 1,
        feature_means: Vec::new(),
        feature_scales: Vec::new(),
    })
}

/// `intercept + dot(coefficients, recent)`, with `recent` most-recent first.
pub fn ar_predict(fit: &FitState, recent: &[f64]) -> Result<f64> {
    if recent.len() != fit.coefficients.len() {
        return Err(Error::DimensionMismatch(format!(
            "AR({}) needs {} recent values, got {}",
            fit.coefficients.len(),
            fit.coefficients.len(),
            recent.len()
        )));
    }
    Ok(fit.intercept
        + fit
            .coefficients
            .iter()
            .zip(recent)
            .map(|(c, y)| c * y)
            .sum::<f64>())
}

/// Forecasts the value after the end of `series`.
pub fn ar_forecast(fit: &FitState, series: &[f64]) -> Result<f64> {
    let p = fit.coefficients.len();
    if series.len() < p {
        return Err(Error::SeriesTooShort {
            needed: p,
            got: series.len(),
        });
    }
    let recent: Vec<f64> = series.iter().rev().take(p).copied().collect();
    ar_predict(fit, &recent)
}
