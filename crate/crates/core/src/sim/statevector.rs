use super::{Mat2, Pauli, QuantumState, C64, ZERO_BRANCH};
use crate::error::{Error, Result};

/// Largest register the dense backend will allocate unless told otherwise.
pub const DEFAULT_MAX_WIRES: usize = 26;

/// Dense amplitudes, little-endian: wire 0 is the least significant bit of
/// the basis index.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_wires: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// `|0...0>` on `n_wires` wires.
    pub fn new(n_wires: usize) -> Result<Self> {
        Self::with_limit(n_wires, DEFAULT_MAX_WIRES)
    }

    pub fn with_limit(n_wires: usize, max_wires: usize) -> Result<Self> {
        if n_wires > max_wires {
            return Err(Error::Resource(format!(
                "{n_wires} wires exceeds the dense ceiling of {max_wires}"
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); 1usize << n_wires];
        amps[0] = C64::new(1.0, 0.0);
        Ok(StateVector { n_wires, amps })
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::Structure(format!(
                "amplitude count {} is not a power of two",
                amps.len()
            )));
        }
        let n_wires = amps.len().trailing_zeros() as usize;
        Ok(StateVector { n_wires, amps })
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    fn check_wire(&self, w: usize) -> Result<()> {
        if w >= self.n_wires {
            Err(Error::Structure(format!(
                "wire {w} out of range for {} wires",
                self.n_wires
            )))
        } else {
            Ok(())
        }
    }

    fn check_finite(&self) -> Result<()> {
        if self.amps.iter().all(|a| a.re.is_finite() && a.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::Numerical("non-finite amplitude".into()))
        }
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

impl QuantumState for StateVector {
    fn n_wires(&self) -> usize {
        self.n_wires
    }

    fn apply_1q(&mut self, wire: usize, m: &Mat2) -> Result<()> {
        self.check_wire(wire)?;
        let bit = 1usize << wire;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let a0 = self.amps[i];
                let a1 = self.amps[i | bit];
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
        self.check_finite()
    }

    fn apply_pauli(&mut self, wire: usize, p: Pauli) -> Result<()> {
        self.check_wire(wire)?;
        let bit = 1usize << wire;
        let i_unit = C64::new(0.0, 1.0);
        for i in 0..self.amps.len() {
            match p {
                Pauli::X if i & bit == 0 => self.amps.swap(i, i | bit),
                Pauli::Y if i & bit == 0 => {
                    let a0 = self.amps[i];
                    let a1 = self.amps[i | bit];
                    self.amps[i] = -i_unit * a1;
                    self.amps[i | bit] = i_unit * a0;
                }
                Pauli::Z if i & bit != 0 => self.amps[i] = -self.amps[i],
                _ => {}
            }
        }
        Ok(())
    }

    fn cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_wire(control)?;
        self.check_wire(target)?;
        if control == target {
            return Err(Error::Structure("cx on a single wire".into()));
        }
        let (cb, tb) = (1usize << control, 1usize << target);
        for i in 0..self.amps.len() {
            if i & cb != 0 && i & tb == 0 {
                self.amps.swap(i, i | tb);
            }
        }
        Ok(())
    }

    fn swap(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_wire(a)?;
        self.check_wire(b)?;
        let (ab, bb) = (1usize << a, 1usize << b);
        for i in 0..self.amps.len() {
            if i & ab != 0 && i & bb == 0 {
                self.amps.swap(i, (i & !ab) | bb);
            }
        }
        Ok(())
    }

    fn prob_one(&self, wire: usize) -> f64 {
        let bit = 1usize << wire;
        let (mut p1, mut total) = (0.0, 0.0);
        for (i, a) in self.amps.iter().enumerate() {
            let n = a.norm_sqr();
            total += n;
            if i & bit != 0 {
                p1 += n;
            }
        }
        if total > 0.0 {
            p1 / total
        } else {
            0.0
        }
    }

    fn collapse(&mut self, wire: usize, outcome: bool) -> Result<()> {
        self.check_wire(wire)?;
        let bit = 1usize << wire;
        let mut kept = 0.0;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i & bit != 0) == outcome {
                kept += a.norm_sqr();
            } else {
                *a = C64::new(0.0, 0.0);
            }
        }
        if kept < ZERO_BRANCH {
            return Err(Error::Numerical(format!(
                "collapse of wire {wire} onto {} has weight {kept:e}",
                u8::from(outcome)
            )));
        }
        let scale = 1.0 / kept.sqrt();
        for a in &mut self.amps {
            *a *= scale;
        }
        Ok(())
    }

    fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }
}
