//! Factored state: a short sum of product states seen through an affine
//! GF(2) relabelling of the computational basis.
//!
//! The represented state is `sum_t c_t U_A (phi_t0 ⊗ ... ⊗ phi_t(n-1))`
//! where `U_A |x> = |A x + b>`. CNOT, SWAP and X only touch `A` and `b`, Z
//! rescales factors, and a general single-qubit gate stays local as long
//! as the wire's row and inverse column meet in one variable. Mid-circuit
//! collapse may double the number of terms; duplicates are merged.

use super::{Mat2, Pauli, QuantumState, StateVector, C64, ZERO_BRANCH};
use crate::error::{Error, Result};

const PARALLEL_TOL: f64 = 1e-12;
const EIGEN_TOL: f64 = 1e-14;
const DROP_TOL: f64 = 1e-15;

#[derive(Clone, Debug)]
struct Term {
    coef: C64,
    f: Vec<[C64; 2]>,
}

#[derive(Clone, Debug)]
pub struct AffineState {
    n: usize,
    /// `rows[k]`: variables whose parity (plus the offset bit) is wire `k`.
    rows: Vec<u64>,
    /// `cols[k]`: variables to flip so that only wire `k` changes.
    cols: Vec<u64>,
    offset: u64,
    terms: Vec<Term>,
}

fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let b = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(b)
        }
    })
}

fn unit(v: usize) -> [C64; 2] {
    let mut f = [C64::new(0.0, 0.0); 2];
    f[v] = C64::new(1.0, 0.0);
    f
}

fn apply_mat(m: &Mat2, v: &[C64; 2]) -> [C64; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

fn inner2(a: &[C64; 2], b: &[C64; 2]) -> C64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

fn inner2_z(a: &[C64; 2], b: &[C64; 2]) -> C64 {
    a[0].conj() * b[0] - a[1].conj() * b[1]
}

#[derive(Clone, Copy, PartialEq)]
enum Basis {
    X,
    Z,
}

/// Eigenvalue of `f` in the given basis, if it is an eigenvector.
fn eigen(f: &[C64; 2], basis: Basis) -> Option<f64> {
    match basis {
        Basis::Z => {
            if f[1].norm() < EIGEN_TOL {
                Some(1.0)
            } else if f[0].norm() < EIGEN_TOL {
                Some(-1.0)
            } else {
                None
            }
        }
        Basis::X => {
            if (f[0] - f[1]).norm() < EIGEN_TOL {
                Some(1.0)
            } else if (f[0] + f[1]).norm() < EIGEN_TOL {
                Some(-1.0)
            } else {
                None
            }
        }
    }
}

/// Splits `f` into its two eigen-components: (weight, unit vector, eigenvalue).
fn split(f: &[C64; 2], basis: Basis) -> [(C64, [C64; 2], f64); 2] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    match basis {
        Basis::Z => [(f[0], unit(0), 1.0), (f[1], unit(1), -1.0)],
        Basis::X => {
            let plus = [C64::new(r, 0.0), C64::new(r, 0.0)];
            let minus = [C64::new(r, 0.0), C64::new(-r, 0.0)];
            [
                ((f[0] + f[1]) * r, plus, 1.0),
                ((f[0] - f[1]) * r, minus, -1.0),
            ]
        }
    }
}

impl AffineState {
    pub const MAX_WIRES: usize = 64;

    /// `|0...0>` on `n` wires.
    pub fn new(n: usize) -> Result<Self> {
        if n > Self::MAX_WIRES {
            return Err(Error::Resource(format!(
                "factored backend supports at most {} wires, got {n}",
                Self::MAX_WIRES
            )));
        }
        Ok(AffineState {
            n,
            rows: (0..n).map(|k| 1u64 << k).collect(),
            cols: (0..n).map(|k| 1u64 << k).collect(),
            offset: 0,
            terms: vec![Term {
                coef: C64::new(1.0, 0.0),
                f: vec![unit(0); n],
            }],
        })
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    fn check_wire(&self, w: usize) -> Result<()> {
        if w >= self.n {
            Err(Error::Structure(format!("wire {w} out of range for {} wires", self.n)))
        } else {
            Ok(())
        }
    }

    fn sign(&self, wire: usize) -> f64 {
        if (self.offset >> wire) & 1 == 1 {
            -1.0
        } else {
            1.0
        }
    }

    fn z_string(term: &mut Term, mask: u64) {
        for j in bits(mask) {
            term.f[j][1] = -term.f[j][1];
        }
    }

    fn x_string(term: &mut Term, mask: u64) {
        for j in bits(mask) {
            term.f[j].swap(0, 1);
        }
    }

    /// Pick a pivot inside `mask`, preferring a factor that is not already
    /// an eigenvector of `basis` so the remaining ones need no split.
    fn pick_pivot(&self, mask: u64, basis: Basis) -> usize {
        let first = &self.terms[0];
        bits(mask)
            .find(|&j| eigen(&first.f[j], basis).is_none())
            .unwrap_or_else(|| mask.trailing_zeros() as usize)
    }

    fn merge(&mut self) {
        if self.terms.len() < 2 {
            self.terms.retain(|t| t.coef.norm() > DROP_TOL);
            return;
        }
        let mut out: Vec<Term> = Vec::with_capacity(self.terms.len());
        'next: for t in self.terms.drain(..) {
            if t.coef.norm() <= DROP_TOL {
                continue;
            }
            for o in out.iter_mut() {
                let mut phase = C64::new(1.0, 0.0);
                let mut parallel = true;
                for (a, b) in o.f.iter().zip(&t.f) {
                    let ip = inner2(a, b);
                    if ip.norm() < 1.0 - PARALLEL_TOL {
                        parallel = false;
                        break;
                    }
                    phase *= ip;
                }
                if parallel {
                    o.coef += t.coef * phase;
                    continue 'next;
                }
            }
            out.push(t);
        }
        out.retain(|t| t.coef.norm() > DROP_TOL);
        self.terms = out;
    }

    /// `sum_{t,t'} conj(c_t) c_t' prod_j <f_tj| Z^[j in mask] |f_t'j>`.
    fn expectation_z(&self, mask: u64) -> C64 {
        let mut total = C64::new(0.0, 0.0);
        for (i, a) in self.terms.iter().enumerate() {
            for (k, b) in self.terms.iter().enumerate().skip(i) {
                let mut prod = a.coef.conj() * b.coef;
                for j in 0..self.n {
                    let ip = if (mask >> j) & 1 == 1 {
                        inner2_z(&a.f[j], &b.f[j])
                    } else if i == k {
                        continue;
                    } else {
                        inner2(&a.f[j], &b.f[j])
                    };
                    prod *= ip;
                }
                if i == k {
                    total += prod;
                } else {
                    total += prod + prod.conj();
                }
            }
        }
        total
    }

    fn rescale(&mut self, factor: f64) {
        for t in &mut self.terms {
            t.coef *= factor;
        }
    }

    /// Expands into dense amplitudes.
    pub fn to_dense(&self, max_wires: usize) -> Result<StateVector> {
        if self.n > max_wires {
            return Err(Error::Resource(format!(
                "dense fallback needs {} wires, ceiling is {max_wires}",
                self.n
            )));
        }
        let dim = 1usize << self.n;
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        for x in 0..dim as u64 {
            let mut y = 0usize;
            for (k, row) in self.rows.iter().enumerate() {
                let bit = ((row & x).count_ones() as u64 + ((self.offset >> k) & 1)) & 1;
                y |= (bit as usize) << k;
            }
            let mut a = C64::new(0.0, 0.0);
            for t in &self.terms {
                let mut p = t.coef;
                for j in 0..self.n {
                    p *= t.f[j][((x >> j) & 1) as usize];
                    if p.norm_sqr() == 0.0 {
                        break;
                    }
                }
                a += p;
            }
            amps[y] = a;
        }
        StateVector::from_amplitudes(amps)
    }

    fn general_expand(&mut self, wire: usize, u: [C64; 4]) {
        let (r, c, s) = (self.rows[wire], self.cols[wire], self.sign(wire));
        let [ui, ux, uy, uz] = u;
        let iu = C64::new(0.0, 1.0);
        let mut out = Vec::with_capacity(self.terms.len() * 4);
        for t in &self.terms {
            if ui.norm() > 0.0 {
                out.push(Term {
                    coef: t.coef * ui,
                    f: t.f.clone(),
                });
            }
            if ux.norm() > 0.0 {
                let mut n = t.clone();
                n.coef *= ux;
                Self::x_string(&mut n, c);
                out.push(n);
            }
            if uy.norm() > 0.0 {
                let mut n = t.clone();
                n.coef *= uy * iu * s;
                Self::z_string(&mut n, r);
                Self::x_string(&mut n, c);
                out.push(n);
            }
            if uz.norm() > 0.0 {
                let mut n = t.clone();
                n.coef *= uz * s;
                Self::z_string(&mut n, r);
                out.push(n);
            }
        }
        self.terms = out;
        self.merge();
    }
}

impl QuantumState for AffineState {
    fn n_wires(&self) -> usize {
        self.n
    }

    fn apply_1q(&mut self, wire: usize, m: &Mat2) -> Result<()> {
        self.check_wire(wire)?;
        let half = 0.5;
        let iu = C64::new(0.0, 1.0);
        let ui = (m[0][0] + m[1][1]) * half;
        let uz = (m[0][0] - m[1][1]) * half;
        let ux = (m[0][1] + m[1][0]) * half;
        let uy = iu * (m[0][1] - m[1][0]) * half;
        let need_x = ux.norm() > 0.0 || uy.norm() > 0.0;
        let need_z = uz.norm() > 0.0 || uy.norm() > 0.0;
        let (r, c, s) = (self.rows[wire], self.cols[wire], self.sign(wire));

        let pivot = match (need_x, need_z) {
            (false, false) => {
                for t in &mut self.terms {
                    t.coef *= ui;
                }
                self.merge();
                return Ok(());
            }
            (true, true) => {
                let meet = r & c;
                if meet.count_ones() != 1 {
                    self.general_expand(wire, [ui, ux, uy, uz]);
                    return Ok(());
                }
                meet.trailing_zeros() as usize
            }
            (true, false) => self.pick_pivot(c, Basis::X),
            (false, true) => self.pick_pivot(r, Basis::Z),
        };
        let pbit = 1u64 << pivot;
        let x_rest = if need_x { c & !pbit } else { 0 };
        let z_rest = if need_z { r & !pbit } else { 0 };

        let before = self.terms.len();
        let mut out = Vec::with_capacity(before);
        for t in self.terms.drain(..) {
            // (term, lambda_x, lambda_z)
            let mut items = vec![(t, 1.0f64, 1.0f64)];
            for (mask, basis) in [(x_rest, Basis::X), (z_rest, Basis::Z)] {
                for j in bits(mask) {
                    let mut next = Vec::with_capacity(items.len() * 2);
                    for (mut it, lx, lz) in items {
                        if let Some(ev) = eigen(&it.f[j], basis) {
                            let (lx, lz) = if basis == Basis::X { (lx * ev, lz) } else { (lx, lz * ev) };
                            next.push((it, lx, lz));
                            continue;
                        }
                        let parts = split(&it.f[j], basis);
                        let mut other = it.clone();
                        it.coef *= parts[0].0;
                        it.f[j] = parts[0].1;
                        other.coef *= parts[1].0;
                        other.f[j] = parts[1].1;
                        for (piece, ev) in [(it, parts[0].2), (other, parts[1].2)] {
                            if piece.coef.norm() <= DROP_TOL {
                                continue;
                            }
                            let (lx, lz) = if basis == Basis::X { (lx * ev, lz) } else { (lx, lz * ev) };
                            next.push((piece, lx, lz));
                        }
                    }
                    items = next;
                }
            }
            for (mut it, lx, lz) in items {
                let a = ux * lx;
                let b = uy * (s * lx * lz);
                let d = uz * (s * lz);
                // ui I + a X + b Y + d Z
                let local: Mat2 = [[ui + d, a - iu * b], [a + iu * b, ui - d]];
                let v = apply_mat(&local, &it.f[pivot]);
                let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
                if norm <= DROP_TOL {
                    continue;
                }
                it.f[pivot] = [v[0] / norm, v[1] / norm];
                it.coef *= norm;
                out.push(it);
            }
        }
        self.terms = out;
        if self.terms.len() != before || self.terms.len() > 1 {
            self.merge();
        }
        if self.terms.is_empty() {
            return Err(Error::Numerical("state annihilated".into()));
        }
        Ok(())
    }

    fn apply_pauli(&mut self, wire: usize, p: Pauli) -> Result<()> {
        self.check_wire(wire)?;
        let (r, s) = (self.rows[wire], self.sign(wire));
        match p {
            Pauli::X => self.offset ^= 1 << wire,
            Pauli::Z | Pauli::Y => {
                let extra = if p == Pauli::Y {
                    // Y = i X Z; the X part flips the offset after Z reads it.
                    C64::new(0.0, 1.0)
                } else {
                    C64::new(1.0, 0.0)
                };
                for t in &mut self.terms {
                    t.coef *= extra * s;
                    Self::z_string(t, r);
                }
                if p == Pauli::Y {
                    self.offset ^= 1 << wire;
                }
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
        self.rows[target] ^= self.rows[control];
        self.offset ^= ((self.offset >> control) & 1) << target;
        self.cols[control] ^= self.cols[target];
        Ok(())
    }

    fn swap(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_wire(a)?;
        self.check_wire(b)?;
        self.rows.swap(a, b);
        self.cols.swap(a, b);
        let (ba, bb) = ((self.offset >> a) & 1, (self.offset >> b) & 1);
        if ba != bb {
            self.offset ^= (1 << a) | (1 << b);
        }
        Ok(())
    }

    fn prob_one(&self, wire: usize) -> f64 {
        let norm = self.expectation_z(0).re;
        let ez = self.expectation_z(self.rows[wire]).re;
        let p = 0.5 * (1.0 - self.sign(wire) * ez / norm);
        p.clamp(0.0, 1.0)
    }

    fn collapse(&mut self, wire: usize, outcome: bool) -> Result<()> {
        self.check_wire(wire)?;
        let r = self.rows[wire];
        let s = self.sign(wire);
        let value = usize::from(outcome);
        if r.count_ones() == 1 {
            let p = r.trailing_zeros() as usize;
            let want = value ^ ((self.offset >> wire) & 1) as usize;
            for t in &mut self.terms {
                t.coef *= t.f[p][want];
                t.f[p] = unit(want);
            }
            self.merge();
        } else {
            let sigma = if outcome { -1.0 } else { 1.0 };
            let mut out = Vec::with_capacity(self.terms.len() * 2);
            for t in self.terms.drain(..) {
                let mut z = t.clone();
                Self::z_string(&mut z, r);
                z.coef *= 0.5 * sigma * s;
                let mut keep = t;
                keep.coef *= 0.5;
                out.push(keep);
                out.push(z);
            }
            self.terms = out;
            self.merge();
        }
        let kept = if self.terms.is_empty() {
            0.0
        } else {
            self.expectation_z(0).re
        };
        if kept < ZERO_BRANCH {
            return Err(Error::Numerical(format!(
                "collapse of wire {wire} onto {value} has weight {kept:e}"
            )));
        }
        self.rescale(1.0 / kept.sqrt());
        Ok(())
    }

    fn norm_sqr(&self) -> f64 {
        self.expectation_z(0).re
    }
}
