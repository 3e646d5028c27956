use rand::Rng;
use rayon::prelude::*;

use super::outcomes::{OutcomeCounts, OutcomeDistribution, ShotRecord};
use super::{
    rng, sample_bit, single_qubit_matrix, HybridState, QuantumState, DEFAULT_MAX_WIRES,
    DEFAULT_TERM_CAP, ZERO_BRANCH,
};
use crate::circuit::{Circuit, Instruction};
use crate::error::{Error, Result};
use crate::noise::{self, Coherence, NoiseModel, Schedule};

/// Backend limits for shot sampling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShotOptions {
    pub term_cap: usize,
    pub max_dense_wires: usize,
}

impl Default for ShotOptions {
    fn default() -> Self {
        ShotOptions {
            term_cap: DEFAULT_TERM_CAP,
            max_dense_wires: DEFAULT_MAX_WIRES,
        }
    }
}

/// Limits for the branch-enumerating oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactOptions {
    pub max_paths: usize,
    pub term_cap: usize,
    pub max_dense_wires: usize,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            max_paths: 1 << 20,
            term_cap: DEFAULT_TERM_CAP,
            max_dense_wires: DEFAULT_MAX_WIRES,
        }
    }
}

fn apply_unitary<S: QuantumState>(state: &mut S, instr: &Instruction) -> Result<()> {
    if let Some((w, m)) = single_qubit_matrix(instr) {
        return state.apply_1q(w, &m);
    }
    match instr {
        Instruction::Cnot { control, target } => state.cnot(*control, *target),
        Instruction::Swap(a, b) => state.swap(*a, *b),
        Instruction::Barrier(_) => Ok(()),
        other => Err(Error::Structure(format!("{other:?} is not unitary"))),
    }
}

/// Applies one instruction without noise.
///
/// Measurements sample the Born rule from `rng`, collapse the state and
/// write `clbits`; a classically controlled instruction runs only when its
/// bit holds the required value.
pub fn apply_instruction<S: QuantumState, R: Rng + ?Sized>(
    state: &mut S,
    instr: &Instruction,
    clbits: &mut [bool],
    rng: &mut R,
) -> Result<()> {
    match instr {
        Instruction::Measure { wire, clbit } => {
            let slot = clbits
                .get_mut(*clbit)
                .ok_or_else(|| Error::Structure(format!("clbit {clbit} out of range")))?;
            if *wire >= state.n_wires() {
                return Err(Error::Structure(format!("wire {wire} out of range")));
            }
            let outcome = sample_bit(state.prob_one(*wire), rng);
            state.collapse(*wire, outcome)?;
            *slot = outcome;
            Ok(())
        }
        Instruction::ClassicallyControlled { clbit, value, inner } => {
            let bit = *clbits
                .get(*clbit)
                .ok_or_else(|| Error::Structure(format!("clbit {clbit} out of range")))?;
            if bit == *value {
                apply_instruction(state, inner, clbits, rng)
            } else {
                Ok(())
            }
        }
        other => apply_unitary(state, other),
    }
}

fn check_runnable(circuit: &Circuit) -> Result<()> {
    circuit.validate()?;
    if circuit.n_clbits > 64 {
        return Err(Error::Resource(format!(
            "{} classical bits exceeds the 64-bit outcome key",
            circuit.n_clbits
        )));
    }
    Ok(())
}

/// Length of the leading stretch that involves no classical bits.
fn unitary_prefix(circuit: &Circuit) -> usize {
    circuit
        .instructions
        .iter()
        .position(|i| !i.clbits().is_empty())
        .unwrap_or(circuit.len())
}

/// A circuit with everything that does not change from shot to shot
/// worked out once.
struct Prepared<'a> {
    circuit: &'a Circuit,
    noise: Option<(&'a NoiseModel, Schedule, Vec<Coherence>, bool)>,
    start_pc: usize,
    start_state: HybridState,
}

impl<'a> Prepared<'a> {
    fn new(circuit: &'a Circuit, noise: Option<&'a NoiseModel>, opts: ShotOptions) -> Result<Self> {
        check_runnable(circuit)?;
        let noise = match noise {
            Some(n) => {
                n.validate()?;
                (!n.is_ideal()).then_some(n)
            }
            None => None,
        };
        let mut start_state = HybridState::new(circuit.n_wires, opts.term_cap, opts.max_dense_wires)?;
        let mut start_pc = 0;
        let noise = match noise {
            Some(n) => {
                let schedule = Schedule::new(circuit, n);
                let coherence = (0..circuit.n_wires).map(|w| n.coherence(w)).collect();
                let idle = n.t1.is_some() || n.t2.is_some();
                Some((n, schedule, coherence, idle))
            }
            None => {
                start_pc = unitary_prefix(circuit);
                for instr in &circuit.instructions[..start_pc] {
                    apply_unitary(&mut start_state, instr)?;
                }
                None
            }
        };
        Ok(Prepared {
            circuit,
            noise,
            start_pc,
            start_state,
        })
    }

    fn shot<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<bool>> {
        let mut state = self.start_state.clone();
        let mut bits = vec![false; self.circuit.n_clbits];
        let rest = &self.circuit.instructions[self.start_pc..];
        let Some((model, schedule, coherence, idle)) = &self.noise else {
            for instr in rest {
                apply_instruction(&mut state, instr, &mut bits, rng)?;
            }
            return Ok(bits);
        };
        let mut last = vec![0.0f64; self.circuit.n_wires];
        for (offset, instr) in rest.iter().enumerate() {
            let i = self.start_pc + offset;
            let base = match instr {
                Instruction::Barrier(_) => continue,
                Instruction::ClassicallyControlled { clbit, value, inner } => {
                    if bits[*clbit] != *value {
                        continue;
                    }
                    inner.as_ref()
                }
                other => other,
            };
            let wires = base.wires();
            if *idle {
                for &w in &wires {
                    let gap = schedule.start[i] - last[w];
                    noise::apply_idle_with(&mut state, w, gap, coherence[w], rng)?;
                    last[w] = schedule.end[i];
                }
            }
            match base {
                Instruction::Measure { wire, clbit } => {
                    let outcome = sample_bit(state.prob_one(*wire), rng);
                    state.collapse(*wire, outcome)?;
                    bits[*clbit] = noise::flip_readout(outcome, model, rng);
                }
                Instruction::Swap(..) => {
                    apply_unitary(&mut state, base)?;
                    for _ in 0..3 {
                        noise::apply_gate_noise(&mut state, &wires, model, rng)?;
                    }
                }
                _ => {
                    apply_unitary(&mut state, base)?;
                    noise::apply_gate_noise(&mut state, &wires, model, rng)?;
                }
            }
        }
        Ok(bits)
    }
}

/// One stochastic execution. With a noise model this samples a single
/// quantum trajectory.
pub fn run_shot<R: Rng + ?Sized>(
    circuit: &Circuit,
    noise: Option<&NoiseModel>,
    rng: &mut R,
) -> Result<ShotRecord> {
    let prepared = Prepared::new(circuit, noise, ShotOptions::default())?;
    Ok(ShotRecord {
        clbit_values: prepared.shot(rng)?,
    })
}

/// `n_shots` independent executions.
///
/// Shot `k` draws from its own ChaCha8 stream keyed by `(seed, k)`, so the
/// counts are identical however the shots are spread over threads.
pub fn run_shots(
    circuit: &Circuit,
    noise: Option<&NoiseModel>,
    n_shots: u64,
    seed: u64,
) -> Result<OutcomeCounts> {
    run_shots_with(circuit, noise, n_shots, seed, ShotOptions::default())
}

pub fn run_shots_with(
    circuit: &Circuit,
    noise: Option<&NoiseModel>,
    n_shots: u64,
    seed: u64,
    opts: ShotOptions,
) -> Result<OutcomeCounts> {
    if n_shots == 0 {
        return Err(Error::Invalid("n_shots must be at least 1".into()));
    }
    let prepared = Prepared::new(circuit, noise, opts)?;
    let n_clbits = circuit.n_clbits;
    (0..n_shots)
        .into_par_iter()
        .map(|k| {
            let mut r = rng::stream(seed, &[k]);
            prepared
                .shot(&mut r)
                .map(|bits| ShotRecord { clbit_values: bits }.mask())
        })
        .try_fold(
            || OutcomeCounts::new(n_clbits),
            |mut acc, mask| {
                acc.record(mask?);
                Ok(acc)
            },
        )
        .try_reduce(
            || OutcomeCounts::new(n_clbits),
            |mut a, b| {
                a.merge(&b);
                Ok(a)
            },
        )
}

/// Exact noiseless outcome probabilities by enumerating every measurement
/// branch.
pub fn exact_distribution(circuit: &Circuit) -> Result<OutcomeDistribution> {
    exact_distribution_with(circuit, ExactOptions::default())
}

pub fn exact_distribution_with(
    circuit: &Circuit,
    opts: ExactOptions,
) -> Result<OutcomeDistribution> {
    let prepared = Prepared::new(
        circuit,
        None,
        ShotOptions {
            term_cap: opts.term_cap,
            max_dense_wires: opts.max_dense_wires,
        },
    )?;
    let mut walk = Walk {
        instrs: &circuit.instructions,
        max_paths: opts.max_paths,
        paths: 0,
        out: OutcomeDistribution::new(circuit.n_clbits),
    };
    walk.descend(prepared.start_pc, prepared.start_state, 0, 1.0)?;
    Ok(walk.out)
}

struct Walk<'a> {
    instrs: &'a [Instruction],
    max_paths: usize,
    paths: usize,
    out: OutcomeDistribution,
}

impl Walk<'_> {
    fn descend(&mut self, mut pc: usize, mut state: HybridState, mut bits: u64, weight: f64) -> Result<()> {
        while pc < self.instrs.len() {
            let instr = match &self.instrs[pc] {
                Instruction::ClassicallyControlled { clbit, value, inner } => {
                    if ((bits >> clbit) & 1 == 1) != *value {
                        pc += 1;
                        continue;
                    }
                    inner.as_ref()
                }
                other => other,
            };
            pc += 1;
            let Instruction::Measure { wire, clbit } = instr else {
                apply_unitary(&mut state, instr)?;
                continue;
            };
            let p1 = state.prob_one(*wire);
            let one_ok = p1 >= ZERO_BRANCH;
            let zero_ok = 1.0 - p1 >= ZERO_BRANCH;
            let mask = 1u64 << clbit;
            if one_ok && zero_ok {
                let mut other = state.clone();
                other.collapse(*wire, true)?;
                self.descend(pc, other, bits | mask, weight * p1)?;
                state.collapse(*wire, false)?;
                bits &= !mask;
                return self.descend(pc, state, bits, weight * (1.0 - p1));
            }
            if one_ok {
                bits |= mask;
            } else {
                bits &= !mask;
            }
            state.collapse(*wire, one_ok)?;
        }
        self.paths += 1;
        if self.paths > self.max_paths {
            return Err(Error::Resource(format!(
                "more than {} measurement branches",
                self.max_paths
            )));
        }
        self.out.add(bits, weight);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::gates;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn measure_after(prep: Vec<Instruction>) -> Circuit {
        let mut c = Circuit::new(1, 1);
        c.extend(prep);
        c.push(Instruction::measure(0, 0));
        c
    }

    #[test]
    fn measuring_zero_gives_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let r = run_shot(&measure_after(vec![]), None, &mut rng).unwrap();
        assert_eq!(r.clbit_values, vec![false]);
        let r = run_shot(&measure_after(vec![Instruction::PauliX(0)]), None, &mut rng).unwrap();
        assert_eq!(r.clbit_values, vec![true]);
    }

    #[test]
    fn plus_state_splits_evenly() {
        let d = exact_distribution(&measure_after(vec![Instruction::Hadamard(0)])).unwrap();
        assert!((d.prob(0) - 0.5).abs() < 1e-15);
        assert!((d.prob(1) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ry_pi_flips() {
        let mut s = HybridState::new(1, 8, 4).unwrap();
        let mut bits = [false];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        apply_instruction(&mut s, &Instruction::ry(0, PI), &mut bits, &mut rng).unwrap();
        assert!((s.prob_one(0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn classical_control_follows_the_bit() {
        let mut c = Circuit::new(2, 2);
        c.push(Instruction::PauliX(0));
        c.push(Instruction::measure(0, 0));
        c.push(Instruction::cif(0, true, Instruction::PauliX(1)));
        c.push(Instruction::cif(0, false, Instruction::Hadamard(1)));
        c.push(Instruction::measure(1, 1));
        let d = exact_distribution(&c).unwrap();
        assert!((d.prob(0b11) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn repeated_measurement_agrees() {
        let mut c = Circuit::new(1, 2);
        c.push(Instruction::ry(0, 1.2));
        c.push(Instruction::measure(0, 0));
        c.push(Instruction::measure(0, 1));
        let d = exact_distribution(&c).unwrap();
        assert!(d.prob(0b01) + d.prob(0b10) < 1e-15);
        let counts = run_shots(&c, None, 2000, 5).unwrap();
        assert_eq!(counts.get(0b01) + counts.get(0b10), 0);
    }

    #[test]
    fn shots_are_seed_deterministic() {
        let mut c = Circuit::new(3, 3);
        for w in 0..3 {
            c.push(Instruction::ry(w, 0.4 + w as f64));
        }
        c.push(Instruction::cx(0, 1));
        for w in 0..3 {
            c.push(Instruction::measure(w, w));
        }
        let noise = NoiseModel::default();
        let a = run_shots(&c, Some(&noise), 500, 11).unwrap();
        let b = run_shots(&c, Some(&noise), 500, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.total_shots, 500);
        let single = run_shots(&c, None, 1, 3).unwrap();
        assert_eq!(single.counts.len(), 1);
    }

    #[test]
    fn branch_budget_is_enforced() {
        let mut c = Circuit::new(4, 4);
        for w in 0..4 {
            c.push(Instruction::Hadamard(w));
            c.push(Instruction::measure(w, w));
        }
        let opts = ExactOptions {
            max_paths: 8,
            ..ExactOptions::default()
        };
        assert!(matches!(
            exact_distribution_with(&c, opts),
            Err(Error::Resource(_))
        ));
        assert_eq!(exact_distribution(&c).unwrap().probs.len(), 16);
    }

    #[test]
    fn zero_shots_rejected() {
        assert!(run_shots(&measure_after(vec![]), None, 0, 0).is_err());
    }

    #[test]
    fn parity_fan_in_splits_into_projected_branches() {
        let n = 4;
        let thetas = [0.3, 1.1, 2.0, 0.7];
        let mut s = HybridState::new(n + 1, 256, 10).unwrap();
        for (k, t) in thetas.iter().enumerate() {
            s.apply_1q(k, &gates::ry(*t)).unwrap();
        }
        let before = s.to_dense().unwrap();
        for k in 0..n {
            s.cnot(k, n).unwrap();
        }
        let after = s.to_dense().unwrap();
        for (idx, amp) in after.amplitudes().iter().enumerate() {
            let data = idx & ((1 << n) - 1);
            let anc = idx >> n;
            let parity = (data.count_ones() & 1) as usize;
            let expect = if anc == parity {
                before.amplitudes()[data]
            } else {
                Default::default()
            };
            assert!((amp - expect).norm() < 1e-12);
        }
    }
}
