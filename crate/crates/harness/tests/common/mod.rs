// SPDX-License-Identifier: MIT OR Apache-2.0
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use conformal_pid::control::ControllerMode;
use conformal_pid::data::Dataset;
use cpid::RunConfig;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

/// Daily closes of a random walk in log space whose volatility triples for
/// the middle third, with a day-of-week column.
pub fn stock_prices(seed: u64, n: usize) -> Vec<(f64, f64)> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut log_p = 100f64.ln();
    (0..n)
        .map(|i| {
            let vol = if i > n / 3 && i < 2 * n / 3 { 0.03 } else { 0.01 };
            let g: f64 = StandardNormal.sample(&mut rng);
            log_p += 0.0002 + vol * g;
            (log_p.exp(), (i % 5) as f64)
        })
        .collect()
}

pub fn write_stock_csv(dir: &Path, seed: u64, n: usize) -> PathBuf {
    let path = dir.join(format!("stock_{seed}.csv"));
    let mut body = String::from("day,close,dow\n");
    for (i, (p, d)) in stock_prices(seed, n).into_iter().enumerate() {
        body.push_str(&format!("{i},{p},{d}\n"));
    }
    std::fs::write(&path, body).unwrap();
    path
}

/// Log closes as an in-memory dataset with the day-of-week feature.
pub fn stock_dataset(seed: u64, n: usize) -> Dataset {
    let rows = stock_prices(seed, n);
    let ys: Vec<f64> = rows.iter().map(|r| r.0.ln()).collect();
    let mut d = Dataset::from_values("stock", &ys);
    d.feature_columns = vec!["dow".into()];
    for (p, r) in d.points.iter_mut().zip(&rows) {
        p.x = vec![r.1];
    }
    d
}

pub fn stock_config(controller: ControllerMode, out: &Path) -> RunConfig {
    let text = format!(
        r#"
name = "stock"
alpha = 0.1
score = "absolute_residual"
controller = "{controller}"
eta_multiplier = 0.1
burn_in = 100
output_dir = "{out}"

[data]
source = "csv"
path = "unused.csv"
y_column = "close"
features = ["dow"]
transform = "log"

[forecaster]
kind = "ar"
p = 3
window = 100

[scorecaster]
kind = "theta"
theta = 2.0
window = 50

[saturation]
kind = "tan"
k_i = "auto"
c_sat = {{ delta = 0.1, horizon = 5000.0 }}

[kernel]
kind = "trailing_window"
width = 200
"#,
        out = out.display()
    );
    RunConfig::from_toml_str(&text).unwrap()
}

pub fn synthetic_config(controller: ControllerMode, kind: &str, length: usize, seed: u64) -> RunConfig {
    let text = format!(
        r#"
name = "synthetic"
alpha = 0.1
score = "direct"
controller = "{controller}"
eta_multiplier = 0.1
burn_in = 100
seed = {seed}
formats = []

[data]
source = "synthetic"
kind = "{kind}"
length = {length}
noise = 1.0

[saturation]
kind = "tan"
k_i = "auto"
c_sat = {{ delta = 0.1, horizon = {length}.0 }}

[kernel]
kind = "trailing_window"
width = 200
"#
    );
    RunConfig::from_toml_str(&text).unwrap()
}
