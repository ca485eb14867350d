// SPDX-License-Identifier: MIT OR Apache-2.0

//! The Theta method for one-step-ahead forecasts.
//!
//! 1. Fit an ordinary least-squares line `a + b t` to the window.
//! 2. Form the theta line `z_t = theta y_t + (1 - theta)(a + b t)`.
//! 3. Smooth `z` by simple exponential smoothing, picking the smoothing
//!    parameter from `0.05, 0.10, ..., 0.95` by in-window one-step squared error.
//! 4. Forecast `(1/theta) SES + (1 - 1/theta)(a + b (n + 1))`.
//!
//! At `theta = 2` this is the equal-weight average of the smoothed forecast and
//! the extrapolated trend.

use crate::error::{Error, Result};

const MIN_LEN: usize = 4;

/// Grid of smoothing parameters, fixed for determinism.
fn smoothing_grid() -> impl Iterator<Item = f64> {
    (1..=19).map(|k| f64::from(k) * 0.05)
}

/// Least-squares line over `t = 1..=n`; returns `(a, b)`.
fn linear_trend(series: &[f64]) -> (f64, f64) {
    let first = series[0];
    if series.iter().all(|&v| v == first) {
        return (first, 0.0);
    }
    let n = series.len() as f64;
    let t_mean = (n + 1.0) / 2.0;
    let y_mean = series.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, &y) in series.iter().enumerate() {
        let dt = (i + 1) as f64 - t_mean;
        sxy += dt * (y - y_mean);
        sxx += dt * dt;
    }
    let b = sxy / sxx;
    (y_mean - b * t_mean, b)
}

/// Runs SES with parameter `a` and returns `(next forecast, in-window SSE)`.
fn ses(z: &[f64], a: f64) -> (f64, f64) {
    let mut level = z[0];
    let mut sse = 0.0;
    for &v in &z[1..] {
        let e = v - level;
        sse += e * e;
        level += a * e;
    }
    (level, sse)
}

pub fn theta_forecast(series: &[f64], theta: f64) -> Result<f64> {
    if series.len() < MIN_LEN {
        return Err(Error::SeriesTooShort {
            needed: MIN_LEN,
            got: series.len(),
        });
    }
    if !(theta >= 1.0 && theta.is_finite()) {
        return Err(Error::InvalidParameter(format!("theta must be at least 1, got {theta}")));
    }
    let (a, b) = linear_trend(series);
    let trend = |t: f64| a + b * t;
    // z_t = trend_t + theta (y_t - trend_t), which equals the theta line
    let z: Vec<f64> = series
        .iter()
        .enumerate()
        .map(|(i, &y)| {
            let tr = trend((i + 1) as f64);
            tr + theta * (y - tr)
        })
        .collect();

    let runs: Vec<(f64, f64)> = smoothing_grid().map(|a| ses(&z, a)).collect();
    let min_sse = runs.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    // first grid point within rounding of the minimum, so near-ties resolve
    // the same way for shifted copies of a series
    let slack = 1e-9 * min_sse + f64::MIN_POSITIVE;
    let smoothed = runs
        .iter()
        .find(|r| r.1 <= min_sse + slack)
        .map(|r| r.0)
        .unwrap_or(z[z.len() - 1]);
    let trend_next = trend((series.len() + 1) as f64);
    Ok(trend_next + (smoothed - trend_next) / theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_series() {
        for c in [0.0, 0.1, -3.7, 1e6] {
            assert_eq!(theta_forecast(&[c; 17], 2.0).unwrap(), c);
        }
    }

    #[test]
    fn linear_series_oracle() {
        // y_t = 2t: the trend is exact, the theta line is the series itself
        // (y - trend = 0) and SES on a line lags by (1 - a)/a steps of slope 2.
        let y: Vec<f64> = (1..=30).map(|t| 2.0 * f64::from(t)).collect();
        let f = theta_forecast(&y, 2.0).unwrap();
        let trend_next = 62.0;
        // brute-force SES oracle over the same grid
        let mut best = (f64::INFINITY, 0.0);
        for k in 1..=19 {
            let a = f64::from(k) * 0.05;
            let mut level = y[0];
            let mut sse = 0.0;
            for &v in &y[1..] {
                sse += (v - level) * (v - level);
                level += a * (v - level);
            }
            if sse < best.0 {
                best = (sse, level);
            }
        }
        let oracle = 0.5 * best.1 + 0.5 * trend_next;
        assert!((f - oracle).abs() < 1e-9, "{f} vs {oracle}");
        assert!(f < trend_next && f > trend_next - 2.0);
    }

    #[test]
    fn theta_one_is_ses() {
        let y = [3.0, 5.0, 4.0, 6.0, 5.5, 7.0, 6.5];
        let f = theta_forecast(&y, 1.0).unwrap();
        let mut best = (f64::INFINITY, 0.0);
        for k in 1..=19 {
            let (fc, sse) = ses(&y, f64::from(k) * 0.05);
            if sse < best.0 {
                best = (sse, fc);
            }
        }
        assert!((f - best.1).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(theta_forecast(&[1.0, 2.0, 3.0], 2.0).is_err());
        assert!(theta_forecast(&[1.0, 2.0, 3.0, 4.0], 0.5).is_err());
    }

    proptest! {
        #[test]
        fn translation_equivariant(series in proptest::collection::vec(-10f64..10.0, 4..60),
                                   shift in -100f64..100.0) {
            let base = theta_forecast(&series, 2.0).unwrap();
            let shifted: Vec<f64> = series.iter().map(|v| v + shift).collect();
            let moved = theta_forecast(&shifted, 2.0).unwrap();
            prop_assert!((moved - (base + shift)).abs() <= 1e-8 * (1.0 + shift.abs() + base.abs()));
        }
    }
}
