//! Round trip through the counts format: simulate, export, read back, score.

use std::f64::consts::{FRAC_PI_4, PI};

use parity_ndc::bench::{
    compute_n_ndc, export_counts, ingest_counts, CountsMetadata, Subprotocol,
};
use parity_ndc::noise::NoiseModel;
use parity_ndc::protocol::OutcomeMap;
use parity_ndc::sim::run_shots;
use parity_ndc::transpile::{build_lnn, LnnOptions, MethodKind};

fn main() -> parity_ndc::error::Result<()> {
    let dir = std::env::temp_dir().join("ndc_ingest_example");
    std::fs::create_dir_all(&dir)?;
    let noise = NoiseModel::default();
    let mut paths = Vec::new();
    for n in 2..=5 {
        for theta in [FRAC_PI_4, PI] {
            for run in 0..5 {
                for sub in [Subprotocol::Single, Subprotocol::Double] {
                    let measured = sub == Subprotocol::Double;
                    let c = build_lnn(MethodKind::HMethod, n, theta, measured, LnnOptions::physical())?;
                    let seed = (n * 100 + run * 2 + measured as usize) as u64 ^ theta.to_bits();
                    let counts = run_shots(&c, Some(&noise), 2000, seed)?;
                    let meta = CountsMetadata {
                        method: MethodKind::HMethod,
                        n,
                        theta,
                        subprotocol: sub,
                        run,
                    };
                    let path = dir.join(format!("h_{n}_{}_{run}_{sub:?}.json", theta.to_bits()));
                    std::fs::write(&path, export_counts(&meta, &counts))?;
                    paths.push(path);
                }
            }
        }
    }
    println!("{} files in {}", paths.len(), dir.display());
    let rows = ingest_counts(&paths, &OutcomeMap::default())?;
    for r in &rows {
        println!("  N={} θ={:.4}  V={:+.4} ± {:.4}", r.n, r.theta, r.v_mean, r.v_sigma);
    }
    print!("{}", compute_n_ndc(MethodKind::HMethod, &rows, false)?.summary());
    Ok(())
}
