// SPDX-License-Identifier: MIT OR Apache-2.0

//! L1-penalized linear quantile regression.
//!
//! Minimizes `sum_i rho_tau(y_i - w0 - w . z_i) + lambda ||w||_1` over
//! standardized features `z` with an unpenalized intercept. The solver is
//! ADMM on the split `r = y - w0 - Z w`, `u = w`: a ridge-type linear solve
//! for `(w0, w)`, the pinball proximal map for `r`, and soft-thresholding
//! for `u`. It runs for a fixed iteration budget and returns the best
//! iterate by objective, evaluated at the sparse copy `u`. The starting
//! candidate is `w = 0` with the intercept at the sample `tau`-quantile, so
//! a penalty large enough to zero every weight returns exactly that
//! quantile.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::forecast::FitState;

pub const DEFAULT_ITERATIONS: usize = 2000;

/// How often the penalty parameter is rebalanced against the residuals.
const REBALANCE_EVERY: usize = 25;

fn validate(features: &[Vec<f64>], targets: &[f64], tau: f64, lambda: f64) -> Result<usize> {
    if features.len() != targets.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} feature rows for {} targets",
            features.len(),
            targets.len()
        )));
    }
    if targets.len() < 2 {
        return Err(Error::SeriesTooShort {
            needed: 2,
            got: targets.len(),
        });
    }
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::InvalidLevel(tau));
    }
    if !(lambda >= 0.0) {
        return Err(Error::InvalidParameter(format!("penalty must be nonnegative, got {lambda}")));
    }
    let d = features[0].len();
    if let Some(bad) = features.iter().position(|r| r.len() != d) {
        return Err(Error::DimensionMismatch(format!(
            "row {bad} has {} features, expected {d}",
            features[bad].len()
        )));
    }
    Ok(d)
}

/// `ceil(tau n)`-th order statistic, the intercept-only pinball minimizer.
pub fn sample_quantile(values: &[f64], tau: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let k = ((tau * n as f64).ceil() as usize).clamp(1, n);
    sorted[k - 1]
}

fn rho(r: f64, tau: f64) -> f64 {
    if r > 0.0 {
        tau * r
    } else {
        (tau - 1.0) * r
    }
}

/// Objective in the original feature scale, penalty on the original weights.
pub fn l1_objective(fit: &FitState, features: &[Vec<f64>], targets: &[f64], tau: f64, lambda: f64) -> f64 {
    let fit_loss: f64 = features
        .iter()
        .zip(targets)
        .map(|(x, &y)| rho(y - fit.predict_row(x), tau))
        .sum();
    fit_loss + lambda * fit.coefficients.iter().map(|w| w.abs()).sum::<f64>()
}

struct Standardized {
    z: Vec<Vec<f64>>,
    means: Vec<f64>,
    scales: Vec<f64>,
}

fn standardize(features: &[Vec<f64>], d: usize) -> Standardized {
    let n = features.len() as f64;
    let mut means = vec![0.0; d];
    let mut scales = vec![1.0; d];
    for j in 0..d {
        let mean = features.iter().map(|r| r[j]).sum::<f64>() / n;
        let var = features.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n;
        means[j] = mean;
        if var > 0.0 && var.is_finite() {
            scales[j] = var.sqrt();
        }
    }
    let z = features
        .iter()
        .map(|r| (0..d).map(|j| (r[j] - means[j]) / scales[j]).collect())
        .collect();
    Standardized { z, means, scales }
}

fn soft_threshold(v: f64, k: f64) -> f64 {
    if v > k {
        v - k
    } else if v < -k {
        v + k
    } else {
        0.0
    }
}

/// Proximal map of `rho_tau / step`.
fn pinball_prox(v: f64, tau: f64, step: f64) -> f64 {
    if v > tau * step {
        v - tau * step
    } else if v < (tau - 1.0) * step {
        v - (tau - 1.0) * step
    } else {
        0.0
    }
}

fn standardized_objective(z: &[Vec<f64>], y: &[f64], w: &[f64], w0: f64, tau: f64, lambda: f64) -> f64 {
    let loss: f64 = z
        .iter()
        .zip(y)
        .map(|(row, &t)| rho(t - w0 - row.iter().zip(w).map(|(a, b)| a * b).sum::<f64>(), tau))
        .sum();
    loss + lambda * w.iter().map(|v| v.abs()).sum::<f64>()
}

pub fn l1_quantile_fit(features: &[Vec<f64>], targets: &[f64], tau: f64, lambda: f64) -> Result<FitState> {
    l1_quantile_fit_with_budget(features, targets, tau, lambda, DEFAULT_ITERATIONS)
}

pub fn l1_quantile_fit_with_budget(
    features: &[Vec<f64>],
    targets: &[f64],
    tau: f64,
    lambda: f64,
    iterations: usize,
) -> Result<FitState> {
    let d = validate(features, targets, tau, lambda)?;
    let n = targets.len();
    let Standardized { z, means, scales } = standardize(features, d);

    let spread = {
        let s = sample_quantile(targets, 0.9) - sample_quantile(targets, 0.1);
        if s > 0.0 && s.is_finite() {
            s
        } else {
            targets.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0)
        }
    };

    // design with a leading column of ones
    let a = DMatrix::from_fn(n, d + 1, |i, j| if j == 0 { 1.0 } else { z[i][j - 1] });
    let y = DVector::from_column_slice(targets);
    let gram = a.transpose() * &a;
    let mut penalty_diag = DMatrix::<f64>::identity(d + 1, d + 1);
    penalty_diag[(0, 0)] = 0.0;
    let factor = |rho_r: f64, rho_u: f64| {
        let m = &gram + &penalty_diag * (rho_u / rho_r);
        m.cholesky()
            .ok_or_else(|| Error::InvalidParameter("quantile regression system is singular".into()))
    };

    let mut best_w0 = sample_quantile(targets, tau);
    let mut best_w = vec![0.0; d];
    let mut best_obj = standardized_objective(&z, targets, &best_w, best_w0, tau, lambda);

    // scaled ADMM state
    let mut rho_r = 1.0 / spread;
    let rho_u = rho_r;
    let mut chol = factor(rho_r, rho_u)?;
    let mut beta = DVector::zeros(d + 1);
    beta[0] = best_w0;
    let mut r = &y - &a * &beta;
    let mut u = DVector::<f64>::zeros(d);
    let mut v = DVector::<f64>::zeros(n);
    let mut p = DVector::<f64>::zeros(d);

    for k in 1..=iterations {
        let mut rhs = a.transpose() * (&y - &r + &v);
        for j in 0..d {
            rhs[j + 1] += (rho_u / rho_r) * (u[j] - p[j]);
        }
        beta = chol.solve(&rhs);
        let fitted = &a * &beta;
        let r_old = r.clone();
        for i in 0..n {
            r[i] = pinball_prox(y[i] - fitted[i] + v[i], tau, 1.0 / rho_r);
        }
        for j in 0..d {
            u[j] = soft_threshold(beta[j + 1] + p[j], lambda / rho_u);
        }
        let primal = &y - &fitted - &r;
        v += &primal;
        for j in 0..d {
            p[j] += beta[j + 1] - u[j];
        }

        // scored at the sparse copy so returned weights carry exact zeros
        let obj = standardized_objective(&z, targets, u.as_slice(), beta[0], tau, lambda);
        if obj < best_obj - 1e-12 * best_obj.abs() {
            best_obj = obj;
            best_w.copy_from_slice(u.as_slice());
            best_w0 = beta[0];
        }

        if k % REBALANCE_EVERY == 0 {
            let primal_norm = primal.norm();
            let dual_norm = rho_r * (&a.transpose() * (&r - &r_old)).norm();
            let scale = if primal_norm > 10.0 * dual_norm {
                2.0
            } else if dual_norm > 10.0 * primal_norm {
                0.5
            } else {
                1.0
            };
            if scale != 1.0 {
                rho_r *= scale;
                v /= scale;
                chol = factor(rho_r, rho_u)?;
            }
        }
    }

    let coefficients: Vec<f64> = best_w.iter().zip(&scales).map(|(w, s)| w / s).collect();
    let intercept = best_w0
        - coefficients
            .iter()
            .zip(&means)
            .map(|(c, m)| c * m)
            .sum::<f64>();
    let residual_scale = (z
        .iter()
        .zip(targets)
        .map(|(row, &t)| (t - best_w0 - row.iter().zip(&best_w).map(|(a, b)| a * b).sum::<f64>()).powi(2))
        .sum::<f64>()
        / n as f64)
        .sqrt();
    Ok(FitState {
        coefficients,
        intercept,
        residual_scale,
        iterations,
        feature_means: means,
        feature_scales: scales,
    })
}
