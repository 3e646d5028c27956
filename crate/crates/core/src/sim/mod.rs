//! State simulation: a dense statevector, a factored representation for
//! wide registers, shot sampling with noise, and an exact branch oracle.

mod affine;
mod exec;
mod hybrid;
mod outcomes;
pub mod rng;
mod statevector;

pub use affine::AffineState;
pub use exec::{
    apply_instruction, exact_distribution, exact_distribution_with, run_shot, run_shots,
    run_shots_with, ExactOptions, ShotOptions,
};
pub use hybrid::{HybridState, DEFAULT_TERM_CAP};
pub use outcomes::{bits_to_string, OutcomeCounts, OutcomeDistribution, ShotRecord};
pub use statevector::{StateVector, DEFAULT_MAX_WIRES};

use num_complex::Complex64;

use crate::circuit::Instruction;
use crate::error::Result;

pub type C64 = Complex64;

/// Row-major 2x2 complex matrix.
pub type Mat2 = [[C64; 2]; 2];

/// Amplitudes below this are treated as zero when deciding branch
/// feasibility.
pub const ZERO_BRANCH: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];
}

/// Operations every simulation backend provides.
pub trait QuantumState: Clone + Send + Sync {
    fn n_wires(&self) -> usize;
    fn apply_1q(&mut self, wire: usize, m: &Mat2) -> Result<()>;
    fn apply_pauli(&mut self, wire: usize, p: Pauli) -> Result<()>;
    fn cnot(&mut self, control: usize, target: usize) -> Result<()>;
    fn swap(&mut self, a: usize, b: usize) -> Result<()> {
        self.cnot(a, b)?;
        self.cnot(b, a)?;
        self.cnot(a, b)
    }
    /// Born probability of reading 1 on `wire`.
    fn prob_one(&self, wire: usize) -> f64;
    /// Projects `wire` onto `outcome` and renormalises.
    fn collapse(&mut self, wire: usize, outcome: bool) -> Result<()>;
    fn norm_sqr(&self) -> f64;
}

pub mod gates {
    //! Matrices for the single-qubit vocabulary.
    use super::{Mat2, C64};
    use std::f64::consts::FRAC_1_SQRT_2;

    const O: C64 = C64::new(0.0, 0.0);
    const L: C64 = C64::new(1.0, 0.0);

    pub fn ry(theta: f64) -> Mat2 {
        let (s, c) = (theta / 2.0).sin_cos();
        [[C64::new(c, 0.0), C64::new(-s, 0.0)], [C64::new(s, 0.0), C64::new(c, 0.0)]]
    }

    pub fn rz(theta: f64) -> Mat2 {
        [[C64::from_polar(1.0, -theta / 2.0), O], [O, C64::from_polar(1.0, theta / 2.0)]]
    }

    pub fn h() -> Mat2 {
        let r = C64::new(FRAC_1_SQRT_2, 0.0);
        [[r, r], [r, -r]]
    }

    pub fn x() -> Mat2 {
        [[O, L], [L, O]]
    }

    pub fn y() -> Mat2 {
        [[O, C64::new(0.0, -1.0)], [C64::new(0.0, 1.0), O]]
    }

    pub fn z() -> Mat2 {
        [[L, O], [O, -L]]
    }

    pub fn sx() -> Mat2 {
        let p = C64::new(0.5, 0.5);
        let m = C64::new(0.5, -0.5);
        [[p, m], [m, p]]
    }

    pub fn t() -> Mat2 {
        [[L, O], [O, C64::from_polar(1.0, std::f64::consts::FRAC_PI_4)]]
    }

    pub fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
        let mut out = [[O; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        out
    }
}

/// Draws a measurement outcome with `P(1) = p_one`, treating probabilities
/// within `ZERO_BRANCH` of 0 or 1 as certain.
pub fn sample_bit<R: rand::Rng + ?Sized>(p_one: f64, rng: &mut R) -> bool {
    if p_one < ZERO_BRANCH {
        false
    } else if p_one > 1.0 - ZERO_BRANCH {
        true
    } else {
        rng.random::<f64>() < p_one
    }
}

/// Matrix of a single-qubit instruction, if it is one.
pub fn single_qubit_matrix(instr: &Instruction) -> Option<(usize, Mat2)> {
    use Instruction::*;
    Some(match instr {
        RotY { wire, angle } => (*wire, gates::ry(*angle)),
        RotZ { wire, angle } => (*wire, gates::rz(*angle)),
        Hadamard(w) => (*w, gates::h()),
        PauliX(w) => (*w, gates::x()),
        SqrtX(w) => (*w, gates::sx()),
        TGate(w) => (*w, gates::t()),
        _ => return None,
    })
}
