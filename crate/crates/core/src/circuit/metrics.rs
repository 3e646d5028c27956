use std::collections::BTreeMap;

use super::{Circuit, Instruction};
use crate::error::Result;

/// Number of time slots under as-soon-as-possible scheduling.
///
/// Each instruction takes one slot on its wires (and on its classical bits
/// for measurements and conditioned instructions). A barrier aligns its
/// wires without consuming a slot.
pub fn depth(circuit: &Circuit) -> Result<usize> {
    circuit.validate()?;
    let mut wire_level = vec![0usize; circuit.n_wires];
    let mut bit_level = vec![0usize; circuit.n_clbits];
    let mut depth = 0;
    for instr in &circuit.instructions {
        if let Instruction::Barrier(ws) = instr {
            let top = ws.iter().map(|&w| wire_level[w]).max().unwrap_or(0);
            for &w in ws {
                wire_level[w] = top;
            }
            continue;
        }
        let wires = instr.wires();
        let bits = instr.clbits();
        let slot = 1 + wires
            .iter()
            .map(|&w| wire_level[w])
            .chain(bits.iter().map(|&c| bit_level[c]))
            .max()
            .unwrap_or(0);
        for w in wires {
            wire_level[w] = slot;
        }
        for c in bits {
            bit_level[c] = slot;
        }
        depth = depth.max(slot);
    }
    Ok(depth)
}

/// CNOTs between adjacent wires, with each adjacent SWAP counted as three.
pub fn count_lnn_cnots(circuit: &Circuit) -> Result<usize> {
    circuit.validate()?;
    Ok(circuit
        .instructions
        .iter()
        .map(|i| match i.base() {
            Instruction::Cnot { control, target } if control.abs_diff(*target) == 1 => 1,
            Instruction::Swap(a, b) if a.abs_diff(*b) == 1 => 3,
            _ => 0,
        })
        .sum())
}

/// All CNOTs regardless of range (SWAPs count as three).
pub fn cnot_count(circuit: &Circuit) -> usize {
    circuit
        .instructions
        .iter()
        .map(|i| match i.base() {
            Instruction::Cnot { .. } => 1,
            Instruction::Swap(..) => 3,
            _ => 0,
        })
        .sum()
}

/// A two-qubit instruction acting on non-adjacent wires.
#[derive(Clone, Debug, PartialEq)]
pub struct LnnViolation {
    pub index: usize,
    pub instruction: Instruction,
    pub distance: usize,
}

pub fn validate_lnn(circuit: &Circuit) -> Vec<LnnViolation> {
    circuit
        .instructions
        .iter()
        .enumerate()
        .filter_map(|(index, instr)| {
            let (a, b) = match instr.base() {
                Instruction::Cnot { control, target } => (*control, *target),
                Instruction::Swap(a, b) => (*a, *b),
                _ => return None,
            };
            let distance = a.abs_diff(b);
            (distance != 1).then(|| LnnViolation {
                index,
                instruction: instr.clone(),
                distance,
            })
        })
        .collect()
}

/// Instruction counts keyed by text mnemonic.
pub fn gate_histogram(circuit: &Circuit) -> BTreeMap<&'static str, usize> {
    let mut hist = BTreeMap::new();
    for instr in &circuit.instructions {
        *hist.entry(super::text::mnemonic(instr.base())).or_insert(0) += 1;
    }
    hist
}
