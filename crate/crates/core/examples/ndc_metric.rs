//! A small benchmark campaign ending in N_NDC for each method.
//!
//! cargo run --release --example ndc_metric

use parity_ndc::bench::{run_benchmark, write_outputs, ExperimentConfig};

fn main() -> parity_ndc::error::Result<()> {
    let config = ExperimentConfig {
        n_min: 2,
        n_max: 16,
        n_runs: 10,
        n_shots: 2000,
        seed: 7,
        output: std::env::temp_dir().join("ndc_metric_example"),
        ..ExperimentConfig::default()
    };
    let out = run_benchmark(&config)?;
    print!("{}", out.summary(&config));
    for report in &out.reports {
        for row in &report.rows {
            println!(
                "  {} N={:>2}  V={:.4}±{:.4}  |V_CD|={:.4}±{:.4}  margin {:+.4}",
                report.method,
                row.n,
                row.v_ndc,
                row.sigma_ndc,
                row.v_cd.abs(),
                row.sigma_cd,
                row.discriminant
            );
        }
    }
    for path in write_outputs(&out, &config, &config.output)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
