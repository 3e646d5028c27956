//! The θ = π control: a faithful no-measurement run reads zero, while
//! dropping the parity gate outright leaves a bias that grows with N.

use std::f64::consts::PI;

use parity_ndc::noise::NoiseModel;
use parity_ndc::protocol::{run_point, RunConfig};
use parity_ndc::transpile::MethodKind;

fn main() -> parity_ndc::error::Result<()> {
    let noise = NoiseModel::default();
    let cfg = RunConfig {
        n_runs: 10,
        n_shots: 2000,
        seed: 5,
        ..RunConfig::default()
    };
    println!("{:>3} {:>18} {:>18} {:>18}", "N", "h", "naive-h", "m");
    for n in (2..=12).step_by(2) {
        let mut line = format!("{n:>3}");
        for m in [MethodKind::HMethod, MethodKind::NaiveH, MethodKind::MMethod] {
            let e = run_point(m, n, PI, &noise, &cfg)?;
            line += &format!(" {:>+9.4} ± {:.4}", e.v, e.sigma);
        }
        println!("{line}");
    }
    Ok(())
}
