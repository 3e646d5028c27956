//! Circuit intermediate representation.
//!
//! Wires sit on a fixed line in index order, so two wires are neighbours
//! exactly when their indices differ by one. Instructions execute in list
//! order; a classically controlled instruction reads its bit at the moment
//! it executes.

mod metrics;
mod text;

pub use metrics::{
    cnot_count, count_lnn_cnots, depth, gate_histogram, validate_lnn, LnnViolation,
};
pub use text::{parse, serialize};

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Index of a quantum wire.
pub type WireId = usize;
/// Index of a classical bit.
pub type ClbitId = usize;

#[derive(Clone, Debug, PartialEq)]
pub enum Instruction {
    RotY { wire: WireId, angle: f64 },
    RotZ { wire: WireId, angle: f64 },
    Hadamard(WireId),
    PauliX(WireId),
    SqrtX(WireId),
    TGate(WireId),
    Cnot { control: WireId, target: WireId },
    Swap(WireId, WireId),
    Measure { wire: WireId, clbit: ClbitId },
    Barrier(Vec<WireId>),
    ClassicallyControlled {
        clbit: ClbitId,
        value: bool,
        inner: Box<Instruction>,
    },
}

impl Instruction {
    pub fn ry(wire: WireId, angle: f64) -> Self {
        Instruction::RotY { wire, angle }
    }

    pub fn rz(wire: WireId, angle: f64) -> Self {
        Instruction::RotZ { wire, angle }
    }

    pub fn cx(control: WireId, target: WireId) -> Self {
        Instruction::Cnot { control, target }
    }

    pub fn measure(wire: WireId, clbit: ClbitId) -> Self {
        Instruction::Measure { wire, clbit }
    }

    pub fn cif(clbit: ClbitId, value: bool, inner: Instruction) -> Self {
        Instruction::ClassicallyControlled {
            clbit,
            value,
            inner: Box::new(inner),
        }
    }

    /// Quantum wires touched, in operand order.
    pub fn wires(&self) -> Vec<WireId> {
        use Instruction::*;
        match self {
            RotY { wire, .. } | RotZ { wire, .. } => vec![*wire],
            Hadamard(w) | PauliX(w) | SqrtX(w) | TGate(w) => vec![*w],
            Cnot { control, target } => vec![*control, *target],
            Swap(a, b) => vec![*a, *b],
            Measure { wire, .. } => vec![*wire],
            Barrier(ws) => ws.clone(),
            ClassicallyControlled { inner, .. } => inner.wires(),
        }
    }

    /// Classical bits read or written.
    pub fn clbits(&self) -> Vec<ClbitId> {
        match self {
            Instruction::Measure { clbit, .. } => vec![*clbit],
            Instruction::ClassicallyControlled { clbit, inner, .. } => {
                let mut v = vec![*clbit];
                for c in inner.clbits() {
                    if c != *clbit {
                        v.push(c);
                    }
                }
                v
            }
            _ => Vec::new(),
        }
    }

    /// The classical bit written by this instruction, if any.
    pub fn written_clbit(&self) -> Option<ClbitId> {
        match self {
            Instruction::Measure { clbit, .. } => Some(*clbit),
            Instruction::ClassicallyControlled { inner, .. } => inner.written_clbit(),
            _ => None,
        }
    }

    /// The instruction with any classical wrapper removed.
    pub fn base(&self) -> &Instruction {
        match self {
            Instruction::ClassicallyControlled { inner, .. } => inner,
            other => other,
        }
    }

    pub fn is_barrier(&self) -> bool {
        matches!(self, Instruction::Barrier(_))
    }

    pub fn is_measure(&self) -> bool {
        matches!(self.base(), Instruction::Measure { .. })
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self.base(), Instruction::Cnot { .. } | Instruction::Swap(..))
    }

    /// Returns a copy with every wire index passed through `f`.
    pub fn map_wires(&self, f: &impl Fn(WireId) -> WireId) -> Instruction {
        use Instruction::*;
        match self {
            RotY { wire, angle } => RotY {
                wire: f(*wire),
                angle: *angle,
            },
            RotZ { wire, angle } => RotZ {
                wire: f(*wire),
                angle: *angle,
            },
            Hadamard(w) => Hadamard(f(*w)),
            PauliX(w) => PauliX(f(*w)),
            SqrtX(w) => SqrtX(f(*w)),
            TGate(w) => TGate(f(*w)),
            Cnot { control, target } => Cnot {
                control: f(*control),
                target: f(*target),
            },
            Swap(a, b) => Swap(f(*a), f(*b)),
            Measure { wire, clbit } => Measure {
                wire: f(*wire),
                clbit: *clbit,
            },
            Barrier(ws) => Barrier(ws.iter().map(|w| f(*w)).collect()),
            ClassicallyControlled {
                clbit,
                value,
                inner,
            } => ClassicallyControlled {
                clbit: *clbit,
                value: *value,
                inner: Box::new(inner.map_wires(f)),
            },
        }
    }

    fn check(&self, n_wires: usize, n_clbits: usize, nested: bool) -> Result<()> {
        use Instruction::*;
        for w in self.wires() {
            if w >= n_wires {
                return Err(Error::Structure(format!(
                    "wire {w} out of range (circuit has {n_wires})"
                )));
            }
        }
        for c in self.clbits() {
            if c >= n_clbits {
                return Err(Error::Structure(format!(
                    "clbit {c} out of range (circuit has {n_clbits})"
                )));
            }
        }
        match self {
            RotY { angle, .. } | RotZ { angle, .. } if !angle.is_finite() => {
                Err(Error::Structure(format!("non-finite angle {angle}")))
            }
            Cnot { control, target } if control == target => Err(Error::Structure(format!(
                "cx on a single wire {control}"
            ))),
            Swap(a, b) if a == b => Err(Error::Structure(format!("swap on a single wire {a}"))),
            Barrier(ws) if ws.is_empty() => Err(Error::Structure("empty barrier".into())),
            ClassicallyControlled { inner, .. } => {
                if nested {
                    return Err(Error::Structure("nested classical control".into()));
                }
                if inner.is_barrier() {
                    return Err(Error::Structure("classically controlled barrier".into()));
                }
                inner.check(n_wires, n_clbits, true)
            }
            _ => Ok(()),
        }
    }
}

/// An ordered instruction list over a fixed register.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Circuit {
    pub n_wires: usize,
    pub n_clbits: usize,
    pub instructions: Vec<Instruction>,
    pub metadata: BTreeMap<String, String>,
}

impl Circuit {
    pub fn new(n_wires: usize, n_clbits: usize) -> Self {
        Circuit {
            n_wires,
            n_clbits,
            instructions: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn push(&mut self, instr: Instruction) -> &mut Self {
        self.instructions.push(instr);
        self
    }

    pub fn extend(&mut self, instrs: impl IntoIterator<Item = Instruction>) -> &mut Self {
        self.instructions.extend(instrs);
        self
    }

    pub fn set_meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.get(key).map(String::as_str)
    }

    /// A barrier across every wire.
    pub fn barrier_all(&mut self) -> &mut Self {
        let ws = (0..self.n_wires).collect();
        self.push(Instruction::Barrier(ws))
    }

    /// Same register and metadata, different instruction list.
    pub fn with_instructions(&self, instructions: Vec<Instruction>) -> Circuit {
        Circuit {
            n_wires: self.n_wires,
            n_clbits: self.n_clbits,
            instructions,
            metadata: self.metadata.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// Checks every structural invariant, reporting the first offending
    /// instruction.
    pub fn validate(&self) -> Result<()> {
        for (i, instr) in self.instructions.iter().enumerate() {
            instr.check(self.n_wires, self.n_clbits, false).map_err(|e| match e {
                Error::Structure(msg) => Error::Structure(format!("instruction {i}: {msg}")),
                other => other,
            })?;
        }
        Ok(())
    }

    /// Fixes classical bit `clbit` to `value`: instructions conditioned on it
    /// are either unwrapped or dropped.
    pub fn resolve_classical_control(&self, clbit: ClbitId, value: bool) -> Circuit {
        let instrs = self
            .instructions
            .iter()
            .filter_map(|instr| match instr {
                Instruction::ClassicallyControlled {
                    clbit: c,
                    value: v,
                    inner,
                } if *c == clbit => (*v == value).then(|| (**inner).clone()),
                other => Some(other.clone()),
            })
            .collect();
        self.with_instructions(instrs)
    }

    /// Multiplies every rotation angle by `factor`.
    pub fn scale_angles(&self, factor: f64) -> Circuit {
        let instrs = self
            .instructions
            .iter()
            .map(|instr| scale_angle(instr, factor))
            .collect();
        self.with_instructions(instrs)
    }

    /// Classical bits that some instruction reads as a condition.
    pub fn control_bits(&self) -> Vec<ClbitId> {
        let mut bits: Vec<ClbitId> = self
            .instructions
            .iter()
            .filter_map(|i| match i {
                Instruction::ClassicallyControlled { clbit, .. } => Some(*clbit),
                _ => None,
            })
            .collect();
        bits.sort_unstable();
        bits.dedup();
        bits
    }
}

fn scale_angle(instr: &Instruction, factor: f64) -> Instruction {
    match instr {
        Instruction::RotY { wire, angle } => Instruction::ry(*wire, angle * factor),
        Instruction::RotZ { wire, angle } => Instruction::rz(*wire, angle * factor),
        Instruction::ClassicallyControlled {
            clbit,
            value,
            inner,
        } => Instruction::cif(*clbit, *value, scale_angle(inner, factor)),
        other => other.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_catches_out_of_range_and_degenerate_gates() {
        let mut c = Circuit::new(2, 1);
        c.push(Instruction::cx(0, 2));
        assert!(matches!(c.validate(), Err(Error::Structure(_))));

        let mut c = Circuit::new(2, 1);
        c.push(Instruction::Swap(1, 1));
        assert!(c.validate().is_err());

        let mut c = Circuit::new(1, 1);
        c.push(Instruction::measure(0, 1));
        assert!(c.validate().is_err());

        let mut c = Circuit::new(1, 1);
        c.push(Instruction::ry(0, f64::NAN));
        assert!(c.validate().is_err());
    }

    #[test]
    fn nested_classical_control_is_rejected() {
        let mut c = Circuit::new(1, 2);
        c.push(Instruction::cif(
            0,
            true,
            Instruction::cif(1, false, Instruction::PauliX(0)),
        ));
        assert!(c.validate().is_err());
    }

    #[test]
    fn resolving_control_unwraps_or_drops() {
        let mut c = Circuit::new(1, 1);
        c.push(Instruction::cif(0, false, Instruction::Hadamard(0)));
        c.push(Instruction::measure(0, 0));
        let off = c.resolve_classical_control(0, true);
        assert_eq!(off.instructions, vec![Instruction::measure(0, 0)]);
        let on = c.resolve_classical_control(0, false);
        assert_eq!(on.instructions[0], Instruction::Hadamard(0));
    }

    #[test]
    fn map_wires_reaches_inside_wrappers() {
        let i = Instruction::cif(0, true, Instruction::cx(0, 1));
        let j = i.map_wires(&|w| w + 3);
        assert_eq!(j.wires(), vec![3, 4]);
    }
}
