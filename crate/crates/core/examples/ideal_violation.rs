//! Exact noiseless violation from branch enumeration next to the closed form.

use std::f64::consts::PI;

use parity_ndc::protocol::{exact_violation, ideal_violation, CircuitForm};
use parity_ndc::transpile::MethodKind;

fn main() -> parity_ndc::error::Result<()> {
    let thetas = [0.0, PI / 8.0, PI / 4.0, PI / 3.0, PI / 2.0, 3.0 * PI / 4.0, PI];
    for n in [2, 3, 4, 6] {
        println!("N = {n}");
        println!("  {:>7} {:>9} {:>9} {:>9} {:>9}", "theta", "formula", "h", "m", "naive-h");
        for &t in &thetas {
            let v = |m| exact_violation(m, n, t, CircuitForm::Lnn);
            println!(
                "  {:>7.4} {:>9.5} {:>9.5} {:>9.5} {:>9.5}",
                t,
                ideal_violation(t, n),
                v(MethodKind::HMethod)?,
                v(MethodKind::MMethod)?,
                v(MethodKind::NaiveH)?,
            );
        }
    }
    Ok(())
}
