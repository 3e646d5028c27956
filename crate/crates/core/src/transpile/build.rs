//! Closed-form circuit generators.
//!
//! Every circuit uses three classical bits: `c1` (first parity), `c2`
//! (final parity) and `cp`, which selects the sub-protocol. `cp = 1` is the
//! double-measurement run, `cp = 0` the single-measurement run.

use super::MethodKind;
use crate::circuit::{Circuit, Instruction, WireId};
use crate::error::{Error, Result};
use crate::sim::AffineState;

pub const C1: usize = 0;
pub const C2: usize = 1;
pub const CP: usize = 2;
pub const N_CLBITS: usize = 3;

/// Options for the optimized generators.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LnnOptions {
    /// H-method: also recover the first parity into `c1` after the final
    /// readout.
    pub record_first_parity: bool,
    /// M-method: split the three next-nearest-neighbour CNOTs into
    /// adjacent ones.
    pub decompose_nnn: bool,
}

impl LnnOptions {
    /// Settings for execution: strictly adjacent gates everywhere.
    pub fn physical() -> Self {
        LnnOptions {
            record_first_parity: false,
            decompose_nnn: true,
        }
    }
}

/// Wire positions of the M-method layout: data flank two central ancillas
/// and one untouched wire sits at the end.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MLayout {
    pub n: usize,
    pub left: usize,
    pub a1: WireId,
    pub a2: WireId,
    pub spare: WireId,
}

impl MLayout {
    pub fn new(n: usize) -> Self {
        let left = n.div_ceil(2);
        MLayout {
            n,
            left,
            a1: left,
            a2: left + 1,
            spare: n + 2,
        }
    }

    /// Data wire of qubit `i` (0-based).
    pub fn data(&self, i: usize) -> WireId {
        if i < self.left {
            i
        } else {
            i + 2
        }
    }

    pub fn n_wires(&self) -> usize {
        self.n + 3
    }
}

fn check_n(n: usize, min: usize, wires: usize) -> Result<()> {
    if n < min {
        return Err(Error::Invalid(format!("need at least {min} qubits, got {n}")));
    }
    if wires > AffineState::MAX_WIRES {
        return Err(Error::Resource(format!(
            "{n} qubits need {wires} wires, beyond the simulator limit of {}",
            AffineState::MAX_WIRES
        )));
    }
    Ok(())
}

fn n_wires(method: MethodKind, n: usize) -> usize {
    match method {
        MethodKind::HMethod | MethodKind::NaiveH => n + 2,
        MethodKind::MMethod | MethodKind::NaiveM => n + 3,
    }
}

fn tag(c: &mut Circuit, method: MethodKind, n: usize, theta: f64, form: &str) {
    c.set_meta("method", method.name())
        .set_meta("n", n)
        .set_meta("theta", theta)
        .set_meta("form", form);
}

fn resolve(c: Circuit, measured: bool) -> Circuit {
    let mut out = c.resolve_classical_control(CP, measured);
    out.set_meta("measured", measured);
    out
}

/// Unoptimized circuit with long-range fan-ins, both sub-protocols selected
/// by `cp`.
pub fn build_reference_controlled(method: MethodKind, n: usize, theta: f64) -> Result<Circuit> {
    check_n(n, 1, n_wires(method, n))?;
    let mut c = match method {
        MethodKind::HMethod => h_reference(n, theta, true),
        MethodKind::MMethod => m_reference(n, theta, true),
        MethodKind::NaiveH => join_branches(
            &h_reference(n, theta, false),
            &naive_h_reference_single(n, theta),
        ),
        MethodKind::NaiveM => m_reference(n, theta, false),
    };
    tag(&mut c, method, n, theta, "reference");
    Ok(c)
}

/// Unoptimized circuit for one sub-protocol.
pub fn build_reference(method: MethodKind, n: usize, theta: f64, measured: bool) -> Result<Circuit> {
    Ok(resolve(build_reference_controlled(method, n, theta)?, measured))
}

/// Optimized nearest-neighbour circuit, both sub-protocols selected by `cp`.
pub fn build_lnn_controlled(
    method: MethodKind,
    n: usize,
    theta: f64,
    opts: LnnOptions,
) -> Result<Circuit> {
    check_n(n, 2, n_wires(method, n))?;
    let mut c = match method {
        MethodKind::HMethod => h_lnn(n, theta, true, opts.record_first_parity),
        MethodKind::MMethod => m_lnn(n, theta, true, opts.decompose_nnn),
        MethodKind::NaiveH => join_branches(
            &h_lnn(n, theta, false, opts.record_first_parity),
            &naive_h_lnn_single(n, theta),
        ),
        MethodKind::NaiveM => m_lnn(n, theta, false, opts.decompose_nnn),
    };
    tag(&mut c, method, n, theta, "lnn");
    Ok(c)
}

/// Optimized nearest-neighbour circuit for one sub-protocol.
pub fn build_lnn(
    method: MethodKind,
    n: usize,
    theta: f64,
    measured: bool,
    opts: LnnOptions,
) -> Result<Circuit> {
    Ok(resolve(build_lnn_controlled(method, n, theta, opts)?, measured))
}

/// Puts two unrelated circuits behind `cp`; barriers are dropped because
/// they cannot be conditioned.
fn join_branches(measured: &Circuit, single: &Circuit) -> Circuit {
    let mut c = Circuit::new(measured.n_wires.max(single.n_wires), N_CLBITS);
    for (value, src) in [(true, measured), (false, single)] {
        for instr in &src.instructions {
            match instr {
                Instruction::Barrier(_) => {}
                Instruction::ClassicallyControlled { .. } => {
                    unreachable!("branch circuits are already resolved")
                }
                other => {
                    c.push(Instruction::cif(CP, value, other.clone()));
                }
            }
        }
    }
    c
}

fn h_reference(n: usize, theta: f64, with_h: bool) -> Circuit {
    let a2 = n + 1;
    let mut c = Circuit::new(n + 2, N_CLBITS);
    if with_h {
        c.push(Instruction::cif(CP, false, Instruction::Hadamard(0)));
    }
    c.extend((1..=n).map(|q| Instruction::ry(q, theta)));
    c.extend((1..=n).map(|q| Instruction::cx(q, 0)));
    c.push(Instruction::measure(0, C1));
    c.barrier_all();
    c.extend((1..=n).map(|q| Instruction::ry(q, theta)));
    c.extend((1..=n).map(|q| Instruction::cx(q, a2)));
    c.push(Instruction::measure(a2, C2));
    c
}

fn naive_h_reference_single(n: usize, theta: f64) -> Circuit {
    let a2 = n + 1;
    let mut c = Circuit::new(n + 2, N_CLBITS);
    c.extend((1..=n).map(|q| Instruction::ry(q, theta)));
    c.extend((1..=n).map(|q| Instruction::ry(q, theta)));
    c.extend((1..=n).map(|q| Instruction::cx(q, a2)));
    c.push(Instruction::measure(a2, C2));
    c
}

fn m_reference(n: usize, theta: f64, spare_readout: bool) -> Circuit {
    let l = MLayout::new(n);
    let data: Vec<WireId> = (0..n).map(|i| l.data(i)).collect();
    let mut c = Circuit::new(l.n_wires(), N_CLBITS);
    c.extend(data.iter().map(|&q| Instruction::ry(q, theta)));
    c.extend(data.iter().map(|&q| Instruction::cx(q, l.a1)));
    mid_measurement(&mut c, &l, spare_readout);
    c.extend(data.iter().rev().map(|&q| Instruction::cx(q, l.a1)));
    c.extend(data.iter().map(|&q| Instruction::ry(q, theta)));
    c.extend(data.iter().map(|&q| Instruction::cx(q, l.a2)));
    c.push(Instruction::measure(l.a2, C2));
    c
}

fn mid_measurement(c: &mut Circuit, l: &MLayout, spare_readout: bool) {
    c.barrier_all();
    c.push(Instruction::cif(CP, true, Instruction::measure(l.a1, C1)));
    if spare_readout {
        c.push(Instruction::cif(CP, false, Instruction::measure(l.spare, C1)));
    }
    c.barrier_all();
}

/// Instructions tagged with the ASAP column they are drawn in.
struct Grid(Vec<(usize, Instruction)>);

impl Grid {
    fn put(&mut self, col: usize, instr: Instruction) {
        self.0.push((col, instr));
    }

    fn into_instructions(mut self) -> Vec<Instruction> {
        self.0.sort_by_key(|(col, instr)| (*col, instr.wires()[0]));
        self.0.into_iter().map(|(_, i)| i).collect()
    }
}

fn h_lnn(n: usize, theta: f64, with_h: bool, record_first: bool) -> Circuit {
    let mut g = Grid(Vec::new());
    if with_h {
        g.put(1, Instruction::cif(CP, false, Instruction::Hadamard(0)));
    }
    for q in 1..=n {
        g.put(1, Instruction::ry(q, theta));
    }
    for k in 0..n {
        g.put(k + 2, Instruction::cx(k, k + 1));
        g.put(k + 4, Instruction::cx(k + 1, k));
        g.put(k + 5, Instruction::ry(k, theta));
    }
    for k in 0..n - 1 {
        g.put(k + 7, Instruction::cx(k, k + 1));
    }
    g.put(n + 6, Instruction::cx(n, n - 1));
    g.put(n + 7, Instruction::cx(n - 1, n));
    g.put(n + 8, Instruction::cx(n, n + 1));
    g.put(n + 9, Instruction::measure(n + 1, C2));
    if record_first {
        g.put(n + 9, Instruction::cx(n, n - 1));
        g.put(n + 10, Instruction::measure(n - 1, C1));
    }
    let mut c = Circuit::new(n + 2, N_CLBITS);
    c.extend(g.into_instructions());
    c
}

fn naive_h_lnn_single(n: usize, theta: f64) -> Circuit {
    let mut c = Circuit::new(n + 2, N_CLBITS);
    c.extend((1..=n).map(|q| Instruction::ry(q, 2.0 * theta)));
    c.extend((1..=n).map(|k| Instruction::cx(k, k + 1)));
    c.push(Instruction::measure(n + 1, C2));
    c
}

/// `CX(c -> t)` across one wire `m`, using only adjacent gates.
pub fn bridge_cnot(control: WireId, target: WireId) -> [Instruction; 4] {
    let m = (control + target) / 2;
    [
        Instruction::cx(control, m),
        Instruction::cx(m, target),
        Instruction::cx(control, m),
        Instruction::cx(m, target),
    ]
}

fn push_cx(c: &mut Circuit, control: WireId, target: WireId, decompose: bool) {
    if decompose && control.abs_diff(target) == 2 {
        c.extend(bridge_cnot(control, target));
    } else {
        c.push(Instruction::cx(control, target));
    }
}

fn m_lnn(n: usize, theta: f64, spare_readout: bool, decompose: bool) -> Circuit {
    let l = MLayout::new(n);
    let (lw, a1, a2, r0) = (l.left, l.a1, l.a2, l.a1 + 2);
    let last = n + 1;
    let mut c = Circuit::new(l.n_wires(), N_CLBITS);
    let rotate = |c: &mut Circuit| {
        c.extend((r0..=last).map(|q| Instruction::ry(q, theta)));
        c.extend((0..lw).map(|q| Instruction::ry(q, theta)));
    };
    let chains = |c: &mut Circuit| {
        for step in 0.. {
            let left = (step + 1 < lw).then(|| Instruction::cx(step, step + 1));
            let right = (last >= r0 + 1 + step).then(|| Instruction::cx(last - step, last - step - 1));
            if left.is_none() && right.is_none() {
                break;
            }
            c.extend(left.into_iter().chain(right));
        }
    };
    c.extend((0..lw).map(|q| Instruction::ry(q, theta)));
    c.extend((r0..=last).map(|q| Instruction::ry(q, theta)));
    chains(&mut c);
    c.push(Instruction::cx(lw - 1, a1));
    push_cx(&mut c, r0, a1, decompose);
    mid_measurement(&mut c, &l, spare_readout);
    push_cx(&mut c, r0, a1, decompose);
    c.push(Instruction::cx(lw - 1, a1));
    let left_undo = lw - 1;
    let right_undo = last - r0;
    for step in 0..left_undo.max(right_undo) {
        if step < left_undo {
            let k = lw - 2 - step;
            c.push(Instruction::cx(k, k + 1));
        }
        if step < right_undo {
            let j = r0 + 1 + step;
            c.push(Instruction::cx(j, j - 1));
        }
    }
    rotate(&mut c);
    chains(&mut c);
    c.push(Instruction::cx(r0, a2));
    push_cx(&mut c, lw - 1, a2, decompose);
    c.push(Instruction::measure(a2, C2));
    c
}
