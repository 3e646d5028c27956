use super::{AffineState, Mat2, Pauli, QuantumState, StateVector};
use crate::error::Result;

/// Term count above which the factored form is expanded densely.
pub const DEFAULT_TERM_CAP: usize = 256;

#[derive(Clone, Debug)]
enum Repr {
    Affine(AffineState),
    Dense(StateVector),
}

/// Factored state that falls back to dense amplitudes when the term count
/// grows past a cap.
#[derive(Clone, Debug)]
pub struct HybridState {
    repr: Repr,
    term_cap: usize,
    max_dense_wires: usize,
}

impl HybridState {
    pub fn new(n_wires: usize, term_cap: usize, max_dense_wires: usize) -> Result<Self> {
        Ok(HybridState {
            repr: Repr::Affine(AffineState::new(n_wires)?),
            term_cap,
            max_dense_wires,
        })
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.repr, Repr::Dense(_))
    }

    /// Dense amplitudes of the current state.
    pub fn to_dense(&self) -> Result<StateVector> {
        match &self.repr {
            Repr::Affine(a) => a.to_dense(self.max_dense_wires),
            Repr::Dense(d) => Ok(d.clone()),
        }
    }

    fn settle(&mut self) -> Result<()> {
        if let Repr::Affine(a) = &self.repr {
            if a.n_terms() > self.term_cap {
                self.repr = Repr::Dense(a.to_dense(self.max_dense_wires)?);
            }
        }
        Ok(())
    }
}

macro_rules! dispatch {
    ($self:ident, $s:ident => $e:expr) => {
        match &mut $self.repr {
            Repr::Affine($s) => $e,
            Repr::Dense($s) => $e,
        }
    };
}

impl QuantumState for HybridState {
    fn n_wires(&self) -> usize {
        match &self.repr {
            Repr::Affine(a) => a.n_wires(),
            Repr::Dense(d) => d.n_wires(),
        }
    }

    fn apply_1q(&mut self, wire: usize, m: &Mat2) -> Result<()> {
        dispatch!(self, s => s.apply_1q(wire, m))?;
        self.settle()
    }

    fn apply_pauli(&mut self, wire: usize, p: Pauli) -> Result<()> {
        dispatch!(self, s => s.apply_pauli(wire, p))
    }

    fn cnot(&mut self, control: usize, target: usize) -> Result<()> {
        dispatch!(self, s => s.cnot(control, target))
    }

    fn swap(&mut self, a: usize, b: usize) -> Result<()> {
        dispatch!(self, s => s.swap(a, b))
    }

    fn prob_one(&self, wire: usize) -> f64 {
        match &self.repr {
            Repr::Affine(a) => a.prob_one(wire),
            Repr::Dense(d) => d.prob_one(wire),
        }
    }

    fn collapse(&mut self, wire: usize, outcome: bool) -> Result<()> {
        dispatch!(self, s => s.collapse(wire, outcome))?;
        self.settle()
    }

    fn norm_sqr(&self) -> f64 {
        match &self.repr {
            Repr::Affine(a) => a.norm_sqr(),
            Repr::Dense(d) => d.norm_sqr(),
        }
    }
}
