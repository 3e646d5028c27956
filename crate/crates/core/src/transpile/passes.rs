//! Distribution-preserving rewrites used to derive the nearest-neighbour
//! circuits from the long-range ones.
//!
//! Each pass either returns an equivalent circuit or refuses with
//! [`Error::PassRefused`]; none of them silently changes behaviour.

use std::collections::BTreeSet;

use super::normalize::independent;
use crate::circuit::{Circuit, ClbitId, Instruction, WireId};
use crate::error::{Error, Result};

fn refuse(pass: &'static str, reason: impl Into<String>) -> Error {
    Error::PassRefused {
        pass,
        reason: reason.into(),
    }
}

fn touches(instr: &Instruction, wires: &[WireId]) -> bool {
    instr.wires().iter().any(|w| wires.contains(w))
}

/// Moves every measurement whose wire and bit are untouched afterwards to
/// the end of the circuit, keeping their relative order.
pub fn commute_measurement_to_end(circuit: &Circuit) -> Result<Circuit> {
    const PASS: &str = "commute_measurement_to_end";
    let instrs = &circuit.instructions;
    let mut moved = Vec::new();
    let mut rest = Vec::new();
    for (i, instr) in instrs.iter().enumerate() {
        if !instr.is_measure() {
            rest.push(instr.clone());
            continue;
        }
        let wire = instr.wires()[0];
        if let Some(blocker) = instrs[i + 1..]
            .iter()
            .find(|g| !g.is_barrier() && (g.wires().contains(&wire) || bit_conflict(instr, g)))
        {
            return Err(refuse(
                PASS,
                format!("measurement at {i} is followed by {blocker:?} on the same wire or bit"),
            ));
        }
        moved.push(instr.clone());
    }
    rest.extend(moved);
    Ok(circuit.with_instructions(rest))
}

/// True when one instruction writes a bit the other reads or writes.
pub(crate) fn bit_conflict(a: &Instruction, b: &Instruction) -> bool {
    let hits = |w: Option<ClbitId>, other: &Instruction| w.is_some_and(|w| other.clbits().contains(&w));
    hits(a.written_clbit(), b) || hits(b.written_clbit(), a)
}

/// Where to put a SWAP chain and which wire it carries where.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SwapChainSpec {
    /// Instruction index the chain is inserted before.
    pub at: usize,
    pub from: WireId,
    pub to: WireId,
}

impl SwapChainSpec {
    fn swaps(&self) -> Vec<Instruction> {
        if self.from < self.to {
            (self.from..self.to).map(|w| Instruction::Swap(w, w + 1)).collect()
        } else {
            (self.to..self.from).rev().map(|w| Instruction::Swap(w + 1, w)).collect()
        }
    }

    /// Where the content of wire `w` sits after the chain.
    fn image(&self, w: WireId) -> WireId {
        let (lo, hi) = (self.from.min(self.to), self.from.max(self.to));
        if w == self.from {
            self.to
        } else if w < lo || w > hi {
            w
        } else if self.from < self.to {
            w - 1
        } else {
            w + 1
        }
    }
}

/// Inserts a SWAP chain carrying `from` to `to`, rewrites everything up to
/// the trailing block of measurements for the moved wires, and undoes the
/// chain just before that block.
pub fn insert_swap_chains(circuit: &Circuit, spec: SwapChainSpec) -> Result<Circuit> {
    const PASS: &str = "insert_swap_chains";
    if spec.from == spec.to || spec.from.max(spec.to) >= circuit.n_wires {
        return Err(refuse(PASS, format!("bad chain {spec:?}")));
    }
    let instrs = &circuit.instructions;
    let suffix = instrs
        .iter()
        .rposition(|i| !(i.is_barrier() || matches!(i, Instruction::Measure { .. })))
        .map_or(0, |p| p + 1);
    if spec.at > suffix {
        return Err(refuse(PASS, "chain would start inside the final measurements"));
    }
    let all: Vec<WireId> = (0..circuit.n_wires).collect();
    let mut out: Vec<Instruction> = instrs[..spec.at].to_vec();
    out.extend(spec.swaps());
    out.extend(instrs[spec.at..suffix].iter().map(|i| i.map_wires(&|w| spec.image(w))));
    out.push(Instruction::Barrier(all.clone()));
    let undo = SwapChainSpec {
        at: 0,
        from: spec.to,
        to: spec.from,
    };
    out.extend(undo.swaps());
    out.push(Instruction::Barrier(all));
    out.extend(instrs[suffix..].iter().cloned());
    Ok(circuit.with_instructions(out))
}

fn swap_image(w: WireId, a: WireId, b: WireId) -> WireId {
    if w == a {
        b
    } else if w == b {
        a
    } else {
        w
    }
}

/// Pushes each long-range CNOT to the right through the SWAPs after it,
/// relabelling it at each crossing, and stops as soon as it has become a
/// nearest-neighbour gate. CNOTs that never become adjacent stay put.
pub fn commute_cnot_through_swaps(circuit: &Circuit) -> Result<Circuit> {
    let mut instrs = circuit.instructions.clone();
    let mut i = instrs.len();
    while i > 0 {
        i -= 1;
        let Instruction::Cnot { control, target } = instrs[i] else {
            continue;
        };
        if control.abs_diff(target) <= 1 {
            continue;
        }
        let (mut c, mut t) = (control, target);
        let mut landing = None;
        for (j, g) in instrs.iter().enumerate().skip(i + 1) {
            match g {
                Instruction::Barrier(_) => break,
                Instruction::Swap(a, b) => {
                    c = swap_image(c, *a, *b);
                    t = swap_image(t, *a, *b);
                    if c.abs_diff(t) == 1 {
                        landing = Some(j);
                        break;
                    }
                }
                other if independent(&Instruction::cx(c, t), other) => {}
                _ => break,
            }
        }
        if let Some(j) = landing {
            instrs.insert(j + 1, Instruction::cx(c, t));
            instrs.remove(i);
        }
    }
    Ok(circuit.with_instructions(instrs))
}

/// What to do with a CNOT that still spans more than one wire after the
/// fan-in chains have been built.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ResidualMode {
    /// Rewrite into adjacent CNOTs with the fan-in identity.
    #[default]
    Identity,
    /// Walk the control next to the target with SWAPs and back.
    SwapBridge,
    /// Leave it as it is.
    Keep,
}

/// `CX(c -> t)` as adjacent CNOTs: the parity chain over `c..t` followed by
/// the chain over the interior wires, which cancels their contribution.
pub fn lnn_cnot(control: WireId, target: WireId) -> Vec<Instruction> {
    let step = |w: WireId| if control < target { w + 1 } else { w - 1 };
    let mut path = vec![control];
    while *path.last().unwrap() != target {
        let next = step(*path.last().unwrap());
        path.push(next);
    }
    let mut out = Vec::new();
    for start in [0, 1] {
        let chain = &path[start..];
        if chain.len() < 2 {
            continue;
        }
        let links: Vec<Instruction> = chain.windows(2).map(|p| Instruction::cx(p[0], p[1])).collect();
        out.extend(links.iter().cloned());
        out.extend(links[..links.len() - 1].iter().rev().cloned());
    }
    out
}

fn residual(control: WireId, target: WireId, mode: ResidualMode) -> Vec<Instruction> {
    if control.abs_diff(target) <= 1 || mode == ResidualMode::Keep {
        return vec![Instruction::cx(control, target)];
    }
    match mode {
        ResidualMode::Identity => lnn_cnot(control, target),
        ResidualMode::SwapBridge => {
            let near = if control < target { target - 1 } else { target + 1 };
            let chain = SwapChainSpec {
                at: 0,
                from: control,
                to: near,
            };
            let back = SwapChainSpec {
                at: 0,
                from: near,
                to: control,
            };
            let mut out = chain.swaps();
            out.push(Instruction::cx(near, target));
            out.extend(back.swaps());
            out
        }
        ResidualMode::Keep => unreachable!(),
    }
}

/// A run of consecutive CNOTs onto one target, as nearest-neighbour
/// chains: each side's controls are folded towards the target starting
/// from the farthest, the nearest control carries the parity across, and
/// the chains are undone.
fn expand_fan_in(controls: &[WireId], target: WireId, mode: ResidualMode) -> Vec<Instruction> {
    let mut left: Vec<WireId> = controls.iter().copied().filter(|&c| c < target).collect();
    let mut right: Vec<WireId> = controls.iter().copied().filter(|&c| c > target).collect();
    left.sort_unstable();
    right.sort_unstable_by(|a, b| b.cmp(a));
    let contiguous = |side: &[WireId]| side.windows(2).all(|p| p[0].abs_diff(p[1]) == 1);
    let distinct = controls.iter().collect::<BTreeSet<_>>().len() == controls.len();
    if !distinct || !contiguous(&left) || !contiguous(&right) {
        return controls.iter().flat_map(|&c| residual(c, target, mode)).collect();
    }
    let chain = |side: &[WireId]| -> Vec<Instruction> {
        side.windows(2).map(|p| Instruction::cx(p[0], p[1])).collect()
    };
    let (lc, rc) = (chain(&left), chain(&right));
    let mut out = Vec::new();
    out.extend(lc.iter().cloned());
    out.extend(rc.iter().cloned());
    for side in [&left, &right] {
        if let Some(&near) = side.last() {
            out.extend(residual(near, target, mode));
        }
    }
    out.extend(lc.iter().rev().cloned());
    out.extend(rc.iter().rev().cloned());
    out
}

/// Replaces every CNOT spanning more than one wire. Consecutive CNOTs that
/// share a target are treated as one fan-in and turned into V-shaped
/// chains.
pub fn expand_long_range_cnot(circuit: &Circuit, mode: ResidualMode) -> Result<Circuit> {
    let instrs = &circuit.instructions;
    let mut out = Vec::with_capacity(instrs.len());
    let mut i = 0;
    while i < instrs.len() {
        let Instruction::Cnot { target, .. } = instrs[i] else {
            out.push(instrs[i].clone());
            i += 1;
            continue;
        };
        let mut j = i;
        let mut controls = Vec::new();
        while let Some(Instruction::Cnot { control, target: t }) = instrs.get(j) {
            if *t != target {
                break;
            }
            controls.push(*control);
            j += 1;
        }
        if controls.iter().all(|c| c.abs_diff(target) <= 1) {
            out.extend(instrs[i..j].iter().cloned());
        } else {
            out.extend(expand_fan_in(&controls, target, mode));
        }
        i = j;
    }
    Ok(circuit.with_instructions(out))
}

fn swap_options(a: WireId, b: WireId) -> [[Instruction; 3]; 2] {
    let (lo, hi) = (a.min(b), a.max(b));
    [
        [Instruction::cx(lo, hi), Instruction::cx(hi, lo), Instruction::cx(lo, hi)],
        [Instruction::cx(hi, lo), Instruction::cx(lo, hi), Instruction::cx(hi, lo)],
    ]
}

fn neighbour<'a>(
    instrs: impl Iterator<Item = &'a Instruction>,
    wires: &[WireId],
) -> Option<&'a Instruction> {
    instrs.filter(|g| !g.is_barrier()).find(|g| touches(g, wires))
}

fn shares_end(a: &Instruction, b: &Instruction) -> bool {
    match (a, b) {
        (
            Instruction::Cnot { control: c1, target: t1 },
            Instruction::Cnot { control: c2, target: t2 },
        ) => c1 == c2 || t1 == t2,
        _ => false,
    }
}

/// Splits each SWAP into three CNOTs and cancels identical CNOT pairs.
///
/// A SWAP is oriented so that one of its CNOTs cancels against a
/// neighbouring gate if possible, otherwise so that its last CNOT commutes
/// with the next gate on those wires. Cancellation scans left to right and
/// looks past barriers and gates on other wires.
pub fn decompose_swaps_and_cancel(circuit: &Circuit) -> Result<Circuit> {
    let mut instrs = circuit.instructions.clone();
    let mut i = 0;
    while i < instrs.len() {
        let Instruction::Swap(a, b) = instrs[i] else {
            i += 1;
            continue;
        };
        let wires = [a, b];
        let prev = neighbour(instrs[..i].iter().rev(), &wires).cloned();
        let next = neighbour(instrs[i + 1..].iter(), &wires).cloned();
        let options = swap_options(a, b);
        let cancels = |o: &[Instruction; 3]| {
            prev.as_ref() == Some(&o[0]) || next.as_ref() == Some(&o[2])
        };
        let commutes = |o: &[Instruction; 3]| next.as_ref().is_some_and(|n| shares_end(&o[2], n));
        let pick = options
            .iter()
            .position(cancels)
            .or_else(|| options.iter().position(commutes))
            .unwrap_or(0);
        instrs.splice(i..=i, options[pick].iter().cloned());
        i += 3;
    }
    cancel_cnot_pairs(&mut instrs);
    Ok(circuit.with_instructions(instrs))
}

fn cancel_cnot_pairs(instrs: &mut Vec<Instruction>) {
    'restart: loop {
        for i in 0..instrs.len() {
            let Instruction::Cnot { control, target } = instrs[i] else {
                continue;
            };
            for j in i + 1..instrs.len() {
                let g = &instrs[j];
                if *g == instrs[i] {
                    instrs.remove(j);
                    instrs.remove(i);
                    continue 'restart;
                }
                if !(g.is_barrier() || !touches(g, &[control, target])) {
                    break;
                }
            }
        }
        return;
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Need {
    Dead,
    Z,
    Full,
}

fn is_diagonal(instr: &Instruction) -> bool {
    matches!(instr, Instruction::RotZ { .. } | Instruction::TGate(_))
}

/// Drops every gate that cannot influence the bits in `keep`.
///
/// Works backwards from the end tracking, per wire, whether anything later
/// still depends on it (`Dead`), only on its computational-basis value
/// (`Z`), or on its full state (`Full`).
pub fn elide_post_final_measurement_gates(
    circuit: &Circuit,
    keep: &[ClbitId],
    drop_barriers: bool,
) -> Result<Circuit> {
    let mut need = vec![Need::Dead; circuit.n_wires];
    let mut bits: BTreeSet<ClbitId> = keep.iter().copied().collect();
    let mut out = Vec::new();
    for instr in circuit.instructions.iter().rev() {
        let cond = match instr {
            Instruction::ClassicallyControlled { clbit, .. } => Some(*clbit),
            _ => None,
        };
        let base = instr.base();
        let keep_it = match base {
            Instruction::Barrier(_) => !drop_barriers,
            Instruction::Measure { wire, clbit } => {
                let kept = bits.contains(clbit) || need[*wire] == Need::Full;
                if kept {
                    if cond.is_none() {
                        bits.remove(clbit);
                    }
                    need[*wire] = need[*wire].max(Need::Z);
                }
                kept
            }
            Instruction::Cnot { control, target } => {
                let (c, t) = (need[*control], need[*target]);
                if t == Need::Dead && c != Need::Full {
                    false
                } else {
                    let both = if c == Need::Full || t == Need::Full {
                        Need::Full
                    } else {
                        Need::Z
                    };
                    need[*control] = c.max(both);
                    need[*target] = t.max(both);
                    true
                }
            }
            Instruction::Swap(a, b) => {
                need.swap(*a, *b);
                need[*a] != Need::Dead || need[*b] != Need::Dead
            }
            g => {
                let w = g.wires()[0];
                match need[w] {
                    Need::Dead => false,
                    Need::Z if is_diagonal(g) => false,
                    Need::Z if matches!(g, Instruction::PauliX(_)) => true,
                    _ => {
                        need[w] = Need::Full;
                        true
                    }
                }
            }
        };
        if keep_it {
            if let Some(b) = cond {
                bits.insert(b);
            }
            out.push(instr.clone());
        }
    }
    out.reverse();
    Ok(circuit.with_instructions(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{gates, QuantumState, StateVector};

    fn unitary_of(n: usize, instrs: &[Instruction]) -> Vec<StateVector> {
        (0..1usize << n)
            .map(|basis| {
                let mut s = StateVector::new(n).unwrap();
                for w in 0..n {
                    if basis >> w & 1 == 1 {
                        s.apply_1q(w, &gates::x()).unwrap();
                    }
                }
                for i in instrs {
                    match i {
                        Instruction::Cnot { control, target } => s.cnot(*control, *target).unwrap(),
                        Instruction::Swap(a, b) => s.swap(*a, *b).unwrap(),
                        Instruction::Barrier(_) => {}
                        other => panic!("unexpected {other:?}"),
                    }
                }
                s
            })
            .collect()
    }

    #[test]
    fn lnn_cnot_matches_long_cnot() {
        for (c, t) in [(0, 2), (0, 4), (4, 1), (3, 0), (1, 2)] {
            let got = unitary_of(5, &lnn_cnot(c, t));
            let want = unitary_of(5, &[Instruction::cx(c, t)]);
            assert_eq!(got, want, "{c}->{t}");
            assert!(lnn_cnot(c, t).iter().all(|g| {
                let w = g.wires();
                w[0].abs_diff(w[1]) == 1
            }));
        }
        assert_eq!(lnn_cnot(0, 2).len(), 4);
    }

    #[test]
    fn two_identical_cnots_cancel() {
        let mut c = Circuit::new(2, 0);
        c.push(Instruction::cx(0, 1));
        c.push(Instruction::cx(0, 1));
        assert!(decompose_swaps_and_cancel(&c).unwrap().is_empty());
    }

    #[test]
    fn swap_becomes_three_cnots() {
        let mut c = Circuit::new(2, 0);
        c.push(Instruction::Swap(0, 1));
        let d = decompose_swaps_and_cancel(&c).unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(unitary_of(2, &d.instructions), unitary_of(2, &c.instructions));
    }

    #[test]
    fn fan_in_expansion_is_exact() {
        for mode in [ResidualMode::Identity, ResidualMode::SwapBridge] {
            let mut c = Circuit::new(7, 0);
            for q in [0, 1, 2, 5, 6] {
                c.push(Instruction::cx(q, 3));
            }
            c.push(Instruction::cx(0, 6));
            let e = expand_long_range_cnot(&c, mode).unwrap();
            assert_eq!(unitary_of(7, &e.instructions), unitary_of(7, &c.instructions));
            for g in &e.instructions {
                let w = g.wires();
                assert_eq!(w[0].abs_diff(w[1]), 1, "{g:?}");
            }
        }
    }

    #[test]
    fn adjacent_cnot_is_left_alone() {
        let mut c = Circuit::new(2, 0);
        c.push(Instruction::cx(0, 1));
        assert_eq!(expand_long_range_cnot(&c, ResidualMode::Identity).unwrap(), c);
    }

    #[test]
    fn measurement_with_later_gates_is_refused() {
        let mut c = Circuit::new(2, 1);
        c.push(Instruction::measure(0, 0));
        c.push(Instruction::cx(0, 1));
        assert!(matches!(
            commute_measurement_to_end(&c),
            Err(Error::PassRefused { .. })
        ));
    }

    #[test]
    fn swap_chain_relabels_the_middle() {
        let mut c = Circuit::new(3, 1);
        c.push(Instruction::Hadamard(0));
        c.push(Instruction::cx(0, 2));
        c.push(Instruction::measure(0, 0));
        let s = insert_swap_chains(&c, SwapChainSpec { at: 1, from: 0, to: 2 }).unwrap();
        assert_eq!(s.instructions[1], Instruction::Swap(0, 1));
        assert_eq!(s.instructions[2], Instruction::Swap(1, 2));
        assert_eq!(s.instructions[3], Instruction::cx(2, 1));
        assert_eq!(s.instructions.last(), Some(&Instruction::measure(0, 0)));
    }

    #[test]
    fn cnot_slides_through_swaps_until_adjacent() {
        let mut c = Circuit::new(4, 0);
        c.push(Instruction::cx(3, 0));
        c.extend((0..3).map(|w| Instruction::Swap(w, w + 1)));
        let m = commute_cnot_through_swaps(&c).unwrap();
        assert_eq!(unitary_of(4, &m.instructions), unitary_of(4, &c.instructions));
        assert_eq!(m.instructions[2], Instruction::cx(3, 2));
    }

    #[test]
    fn elision_keeps_only_the_light_cone() {
        let mut c = Circuit::new(3, 2);
        c.push(Instruction::ry(0, 0.3));
        c.push(Instruction::cx(0, 1));
        c.push(Instruction::measure(1, 1));
        c.push(Instruction::cx(0, 2));
        c.push(Instruction::ry(2, 0.1));
        c.push(Instruction::rz(1, 0.5));
        c.push(Instruction::measure(2, 0));
        let e = elide_post_final_measurement_gates(&c, &[1], true).unwrap();
        assert_eq!(e.instructions, c.instructions[..3].to_vec());
    }
}
