use crate::circuit::{Circuit, Instruction};

use super::NoiseModel;

/// Time an instruction keeps its wires busy.
pub fn duration(instr: &Instruction, noise: &NoiseModel) -> f64 {
    use Instruction::*;
    match instr {
        RotY { .. } | RotZ { .. } | Hadamard(_) | PauliX(_) | SqrtX(_) | TGate(_) => noise.dur_1q,
        Cnot { .. } => noise.dur_2q,
        Swap(..) => 3.0 * noise.dur_2q,
        Measure { .. } => noise.dur_meas,
        Barrier(_) => 0.0,
        ClassicallyControlled { inner, .. } => duration(inner, noise),
    }
}

/// As-soon-as-possible timing of a circuit with real durations.
///
/// An instruction starts once all of its wires and classical bits are free.
/// A barrier lifts every wire it names to the latest of their free times.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub start: Vec<f64>,
    pub end: Vec<f64>,
    /// Busy intervals per wire, in execution order.
    pub busy: Vec<Vec<(f64, f64)>>,
    pub makespan: f64,
}

impl Schedule {
    pub fn new(circuit: &Circuit, noise: &NoiseModel) -> Schedule {
        let mut wire_free = vec![0.0f64; circuit.n_wires];
        let mut bit_free = vec![0.0f64; circuit.n_clbits];
        let mut start = Vec::with_capacity(circuit.len());
        let mut end = Vec::with_capacity(circuit.len());
        let mut busy = vec![Vec::new(); circuit.n_wires];
        for instr in &circuit.instructions {
            let wires = instr.wires();
            if let Instruction::Barrier(ws) = instr {
                let t = ws.iter().map(|&w| wire_free[w]).fold(0.0, f64::max);
                for &w in ws {
                    wire_free[w] = t;
                }
                start.push(t);
                end.push(t);
                continue;
            }
            let bits = instr.clbits();
            let t0 = wires
                .iter()
                .map(|&w| wire_free[w])
                .chain(bits.iter().map(|&b| bit_free[b]))
                .fold(0.0, f64::max);
            let t1 = t0 + duration(instr, noise);
            for &w in &wires {
                wire_free[w] = t1;
                busy[w].push((t0, t1));
            }
            for &b in &bits {
                bit_free[b] = t1;
            }
            start.push(t0);
            end.push(t1);
        }
        let makespan = end.iter().copied().fold(0.0, f64::max);
        Schedule {
            start,
            end,
            busy,
            makespan,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measurement_holds_up_later_gates() {
        let mut c = Circuit::new(2, 1);
        c.push(Instruction::measure(0, 0));
        c.push(Instruction::Hadamard(1));
        c.push(Instruction::cx(0, 1));
        let s = Schedule::new(&c, &NoiseModel::ideal());
        assert_eq!(s.start, vec![0.0, 0.0, 76.0]);
        assert_eq!(s.makespan, 78.0);
    }

    #[test]
    fn barrier_aligns_wires() {
        let mut c = Circuit::new(2, 0);
        c.push(Instruction::cx(0, 1));
        c.push(Instruction::Hadamard(0));
        c.barrier_all();
        c.push(Instruction::Hadamard(1));
        let s = Schedule::new(&c, &NoiseModel::ideal());
        assert_eq!(s.start[3], 3.0);
        assert_eq!(s.busy[1], vec![(0.0, 2.0), (3.0, 4.0)]);
    }

    #[test]
    fn intervals_on_a_wire_never_overlap() {
        let mut c = Circuit::new(3, 1);
        c.push(Instruction::ry(0, 0.1));
        c.push(Instruction::cx(0, 1));
        c.push(Instruction::Swap(1, 2));
        c.push(Instruction::measure(2, 0));
        c.push(Instruction::cif(0, true, Instruction::PauliX(0)));
        let s = Schedule::new(&c, &NoiseModel::default());
        for line in &s.busy {
            for pair in line.windows(2) {
                assert!(pair[0].1 <= pair[1].0);
            }
        }
    }
}
