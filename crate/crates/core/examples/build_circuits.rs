//! Protocol circuits for both methods on a nearest-neighbour line.
//!
//! cargo run --example build_circuits -- 6

use std::f64::consts::FRAC_PI_4;

use parity_ndc::circuit::{count_lnn_cnots, depth, gate_histogram, serialize, validate_lnn};
use parity_ndc::transpile::{build_lnn, LnnOptions, MethodKind};

fn main() -> parity_ndc::error::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);

    for method in [MethodKind::HMethod, MethodKind::MMethod] {
        let c = build_lnn(method, n, FRAC_PI_4, true, LnnOptions::physical())?;
        println!("== {method}, N = {n}, {} wires", c.n_wires);
        println!(
            "depth {}  cnots {}  lnn violations {}",
            depth(&c)?,
            count_lnn_cnots(&c)?,
            validate_lnn(&c).len()
        );
        println!("{:?}", gate_histogram(&c));
        print!("{}", serialize(&c));
    }
    Ok(())
}
