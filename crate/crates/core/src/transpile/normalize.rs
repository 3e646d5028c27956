use super::passes::bit_conflict;
use crate::circuit::{depth, Circuit, Instruction};

/// Whether two instructions can be swapped when adjacent without any
/// effect: they touch different wires and bits, or they are CNOTs sharing
/// a control or sharing a target.
pub(crate) fn independent(a: &Instruction, b: &Instruction) -> bool {
    if a.is_barrier() || b.is_barrier() {
        return false;
    }
    if bit_conflict(a, b) {
        return false;
    }
    let wa = a.wires();
    if !b.wires().iter().any(|w| wa.contains(w)) {
        return true;
    }
    match (a, b) {
        (
            Instruction::Cnot { control: c1, target: t1 },
            Instruction::Cnot { control: c2, target: t2 },
        ) => (c1 == c2 && t1 != c2 && t2 != c1) || (t1 == t2 && c1 != t2 && c2 != t1),
        _ => false,
    }
}

fn sort_key(instr: &Instruction) -> (Vec<usize>, String) {
    (instr.wires(), format!("{instr:?}"))
}

/// Canonical ordering of a circuit's gates modulo commutation.
///
/// Barriers are removed; then the gate with the smallest key among those
/// whose non-commuting predecessors have all been placed is emitted next.
/// Two circuits that differ only by swapping adjacent independent gates get
/// the same normal form.
pub fn normal_form(circuit: &Circuit) -> Vec<Instruction> {
    let gates: Vec<&Instruction> = circuit
        .instructions
        .iter()
        .filter(|i| !i.is_barrier())
        .collect();
    let n = gates.len();
    let mut preds = vec![0usize; n];
    let mut succs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for j in 0..n {
        for i in 0..j {
            if !independent(gates[i], gates[j]) {
                preds[j] += 1;
                succs[i].push(j);
            }
        }
    }
    let keys: Vec<_> = gates.iter().map(|g| sort_key(g)).collect();
    let mut ready: Vec<usize> = (0..n).filter(|&j| preds[j] == 0).collect();
    let mut out = Vec::with_capacity(n);
    while !ready.is_empty() {
        let pos = (0..ready.len())
            .min_by(|&a, &b| keys[ready[a]].cmp(&keys[ready[b]]).then(ready[a].cmp(&ready[b])))
            .unwrap();
        let g = ready.swap_remove(pos);
        out.push(gates[g].clone());
        for &s in &succs[g] {
            preds[s] -= 1;
            if preds[s] == 0 {
                ready.push(s);
            }
        }
    }
    out
}

/// Reorders commuting gates to shorten the as-soon-as-possible schedule.
///
/// Works segment by segment between barriers. Each layer takes ready gates
/// on free wires, longest remaining dependency chain first. Ties are broken
/// both ways and the shallower result is kept.
pub fn compact(circuit: &Circuit) -> Circuit {
    let a = compact_with(circuit, false);
    let b = compact_with(circuit, true);
    match (depth(&a), depth(&b)) {
        (Ok(da), Ok(db)) if db < da => b,
        _ => a,
    }
}

fn compact_with(circuit: &Circuit, late_first: bool) -> Circuit {
    let mut out = circuit.with_instructions(Vec::new());
    let mut segment: Vec<Instruction> = Vec::new();
    for instr in &circuit.instructions {
        if instr.is_barrier() {
            out.extend(schedule_segment(&segment, late_first));
            segment.clear();
            out.push(instr.clone());
        } else {
            segment.push(instr.clone());
        }
    }
    out.extend(schedule_segment(&segment, late_first));
    out
}

fn schedule_segment(gates: &[Instruction], late_first: bool) -> Vec<Instruction> {
    let n = gates.len();
    let mut preds = vec![0usize; n];
    let mut succs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for j in 0..n {
        for i in 0..j {
            if !independent(&gates[i], &gates[j]) {
                preds[j] += 1;
                succs[i].push(j);
            }
        }
    }
    let mut height = vec![1usize; n];
    for i in (0..n).rev() {
        height[i] += succs[i].iter().map(|&s| height[s]).max().unwrap_or(0);
    }
    let mut placed = vec![false; n];
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let mut ready: Vec<usize> = (0..n).filter(|&j| !placed[j] && preds[j] == 0).collect();
        ready.sort_by(|&a, &b| {
            let tie = if late_first { b.cmp(&a) } else { a.cmp(&b) };
            height[b].cmp(&height[a]).then(tie)
        });
        let mut busy_wires = Vec::new();
        let mut busy_bits = Vec::new();
        let mut layer = Vec::new();
        for g in ready {
            let wires = gates[g].wires();
            let bits = gates[g].clbits();
            if wires.iter().any(|w| busy_wires.contains(w))
                || bits.iter().any(|b| busy_bits.contains(b))
            {
                continue;
            }
            busy_wires.extend(wires);
            busy_bits.extend(bits);
            layer.push(g);
        }
        for &g in &layer {
            placed[g] = true;
            out.push(gates[g].clone());
        }
        for &g in &layer {
            for &s in &succs[g] {
                preds[s] -= 1;
            }
        }
    }
    out
}

/// True when the circuits have the same registers and the same normal form.
pub fn same_up_to_commutation(a: &Circuit, b: &Circuit) -> bool {
    a.n_wires == b.n_wires && a.n_clbits == b.n_clbits && normal_form(a) == normal_form(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commuting_reorder_has_same_form() {
        let mut a = Circuit::new(4, 1);
        a.push(Instruction::cx(0, 1));
        a.push(Instruction::cx(0, 2));
        a.push(Instruction::Hadamard(3));
        a.barrier_all();
        a.push(Instruction::measure(3, 0));
        let mut b = Circuit::new(4, 1);
        b.push(Instruction::Hadamard(3));
        b.push(Instruction::cx(0, 2));
        b.push(Instruction::measure(3, 0));
        b.push(Instruction::cx(0, 1));
        assert!(same_up_to_commutation(&a, &b));
    }

    #[test]
    fn non_commuting_reorder_differs() {
        let mut a = Circuit::new(3, 0);
        a.push(Instruction::cx(0, 1));
        a.push(Instruction::cx(1, 2));
        let mut b = Circuit::new(3, 0);
        b.push(Instruction::cx(1, 2));
        b.push(Instruction::cx(0, 1));
        assert!(!same_up_to_commutation(&a, &b));
    }

    #[test]
    fn shared_target_and_shared_control_commute() {
        assert!(independent(&Instruction::cx(0, 2), &Instruction::cx(1, 2)));
        assert!(independent(&Instruction::cx(0, 1), &Instruction::cx(0, 2)));
        assert!(!independent(&Instruction::cx(0, 1), &Instruction::cx(1, 0)));
        assert!(!independent(
            &Instruction::measure(0, 0),
            &Instruction::cif(0, true, Instruction::PauliX(1))
        ));
    }
}
