use super::build::{C1, C2};
use super::normalize::compact;
use super::passes::{
    commute_cnot_through_swaps, commute_measurement_to_end, decompose_swaps_and_cancel,
    elide_post_final_measurement_gates, expand_long_range_cnot, insert_swap_chains, ResidualMode,
    SwapChainSpec,
};
use crate::circuit::Circuit;
use crate::error::{Error, Result};

pub const H_PASSES: [&str; 7] = [
    "commute_measurement_to_end",
    "insert_swap_chains",
    "commute_cnot_through_swaps",
    "expand_long_range_cnot",
    "decompose_swaps_and_cancel",
    "elide_post_final_measurement_gates",
    "compact",
];

pub const M_PASSES: [&str; 4] = [
    "expand_long_range_cnot",
    "decompose_swaps_and_cancel",
    "elide_post_final_measurement_gates",
    "compact",
];

/// Derives the optimized H-method circuit from the controlled reference.
///
/// Returns the circuit after every pass, in order. With `keep_first` the
/// first-ancilla readout survives the final elision.
pub fn h_pipeline(reference: &Circuit, keep_first: bool) -> Result<Vec<(&'static str, Circuit)>> {
    let n = reference.n_wires.checked_sub(2).filter(|n| *n >= 1).ok_or_else(|| {
        Error::Invalid("H-method reference needs at least three wires".into())
    })?;
    let mut stages = Vec::new();
    let c = commute_measurement_to_end(reference)?;
    stages.push((H_PASSES[0], c));
    let last = &stages.last().unwrap().1;
    let at = last
        .instructions
        .iter()
        .position(|i| i.is_barrier())
        .ok_or_else(|| Error::Invalid("reference has no barrier after the first fan-in".into()))?;
    let c = insert_swap_chains(last, SwapChainSpec { at, from: 0, to: n })?;
    stages.push((H_PASSES[1], c));
    let c = commute_cnot_through_swaps(&stages.last().unwrap().1)?;
    stages.push((H_PASSES[2], c));
    let c = expand_long_range_cnot(&stages.last().unwrap().1, ResidualMode::SwapBridge)?;
    stages.push((H_PASSES[3], c));
    let c = decompose_swaps_and_cancel(&stages.last().unwrap().1)?;
    stages.push((H_PASSES[4], c));
    let keep: &[usize] = if keep_first { &[C1, C2] } else { &[C2] };
    let c = elide_post_final_measurement_gates(&stages.last().unwrap().1, keep, true)?;
    stages.push((H_PASSES[5], c));
    let c = compact(&stages.last().unwrap().1);
    stages.push((H_PASSES[6], c));
    Ok(stages)
}

/// Derives the optimized M-method circuit from the controlled reference.
pub fn m_pipeline(reference: &Circuit) -> Result<Vec<(&'static str, Circuit)>> {
    let mut stages = Vec::new();
    let c = expand_long_range_cnot(reference, ResidualMode::Keep)?;
    stages.push((M_PASSES[0], c));
    let c = decompose_swaps_and_cancel(&stages.last().unwrap().1)?;
    stages.push((M_PASSES[1], c));
    let c = elide_post_final_measurement_gates(&stages.last().unwrap().1, &[C1, C2], false)?;
    stages.push((M_PASSES[2], c));
    let c = compact(&stages.last().unwrap().1);
    stages.push((M_PASSES[3], c));
    Ok(stages)
}
