//! Sampled violation against θ under the default noise model.
//!
//! cargo run --release --example noisy_sweep -- 6

use std::f64::consts::PI;

use parity_ndc::noise::NoiseModel;
use parity_ndc::protocol::{theta_sweep, RunConfig};
use parity_ndc::transpile::MethodKind;

fn main() -> parity_ndc::error::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let thetas: Vec<f64> = (0..=8).map(|i| PI * i as f64 / 8.0).collect();
    let cfg = RunConfig {
        n_runs: 10,
        n_shots: 2000,
        seed: 11,
        ..RunConfig::default()
    };
    let noise = NoiseModel::default();
    println!("noise {}  ({})", noise.fingerprint(), serde_json::to_string(&noise).unwrap());
    for method in [MethodKind::HMethod, MethodKind::MMethod] {
        println!("{method}, N = {n}");
        for p in theta_sweep(method, n, &thetas, &noise, &cfg)? {
            println!(
                "  θ = {:.4}  V = {:+.4} ± {:.4}   ideal {:+.4}",
                p.theta, p.estimate.v, p.estimate.sigma, p.ideal_v
            );
        }
    }
    Ok(())
}
