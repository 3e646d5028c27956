//! Rewrites a long-range reference circuit into nearest-neighbour form,
//! one pass at a time, and checks the result against the direct generator.

use std::f64::consts::FRAC_PI_4;

use parity_ndc::circuit::{count_lnn_cnots, depth, validate_lnn};
use parity_ndc::transpile::{
    build_lnn_controlled, build_reference_controlled, check_equivalence, h_pipeline, m_pipeline,
    same_up_to_commutation, LnnOptions, MethodKind,
};

fn main() -> parity_ndc::error::Result<()> {
    let n = 5;
    for method in [MethodKind::HMethod, MethodKind::MMethod] {
        let reference = build_reference_controlled(method, n, FRAC_PI_4)?;
        let stages = match method {
            MethodKind::HMethod => h_pipeline(&reference, false)?,
            _ => m_pipeline(&reference)?,
        };
        println!("{method}, N = {n}");
        println!("  {:<32} {:>5} {:>5} {:>5}", "stage", "depth", "cx", "long");
        for (name, c) in &stages {
            // Long-range CNOTs count as zero here; the last column shows them.
            let cx = count_lnn_cnots(c).unwrap_or(0);
            println!(
                "  {:<32} {:>5} {:>5} {:>5}",
                name,
                depth(c)?,
                cx,
                validate_lnn(c).len()
            );
        }
        let last = &stages.last().unwrap().1;
        let direct = build_lnn_controlled(method, n, FRAC_PI_4, LnnOptions::default())?;
        let verdict = check_equivalence(&reference, last, 10, 1e-10)?;
        println!(
            "  matches generator: {}   equivalent to reference: {} (max dev {:.1e})",
            same_up_to_commutation(last, &direct),
            verdict.passed,
            verdict.max_deviation
        );
    }
    Ok(())
}
