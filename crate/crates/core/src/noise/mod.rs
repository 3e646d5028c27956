//! Trajectory noise: depolarizing errors after gates, relaxation and
//! dephasing while a wire waits, and assignment errors on readout.

mod schedule;

pub use schedule::{duration, Schedule};

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::sim::{rng, sample_bit, Pauli, QuantumState};

/// Error channels and operation durations.
///
/// Times share one arbitrary unit. `None` for `t1` or `t2` means the wire
/// never relaxes or dephases; config files write this as `inf`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseModel {
    pub p1: f64,
    pub p2: f64,
    #[serde(with = "coherence_time")]
    pub t1: Option<f64>,
    #[serde(with = "coherence_time")]
    pub t2: Option<f64>,
    pub dur_1q: f64,
    pub dur_2q: f64,
    pub dur_meas: f64,
    /// Probability of reading a 1 as 0.
    pub readout_p01: f64,
    /// Probability of reading a 0 as 1.
    pub readout_p10: f64,
    /// Relative spread of per-wire coherence times; each wire's t1 and t2
    /// are scaled by a factor drawn uniformly from `[1 - jitter, 1 + jitter]`.
    pub jitter: f64,
    pub jitter_seed: u64,
}

mod coherence_time {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(t.unwrap_or(f64::INFINITY))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.filter(|t| t.is_finite()))
    }
}

impl Default for NoiseModel {
    /// Calibrated so that the H-method keeps a resolvable violation for
    /// roughly the first dozen qubits and loses it before twenty.
    fn default() -> Self {
        NoiseModel {
            p1: 3e-3,
            p2: 3e-2,
            t1: Some(5000.0),
            t2: Some(600.0),
            dur_1q: 1.0,
            dur_2q: 2.0,
            dur_meas: 76.0,
            readout_p01: 0.02,
            readout_p10: 0.02,
            jitter: 0.0,
            jitter_seed: 0,
        }
    }
}

/// Coherence times of one wire after jitter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coherence {
    pub t1: Option<f64>,
    pub t2: Option<f64>,
}

impl NoiseModel {
    /// No errors at all; durations keep their defaults.
    pub fn ideal() -> Self {
        NoiseModel {
            p1: 0.0,
            p2: 0.0,
            t1: None,
            t2: None,
            readout_p01: 0.0,
            readout_p10: 0.0,
            ..NoiseModel::default()
        }
    }

    /// Only two-qubit depolarizing noise.
    pub fn depolarizing(p2: f64) -> Self {
        NoiseModel {
            p2,
            ..NoiseModel::ideal()
        }
    }

    pub fn is_ideal(&self) -> bool {
        self.p1 == 0.0
            && self.p2 == 0.0
            && self.t1.is_none()
            && self.t2.is_none()
            && self.readout_p01 == 0.0
            && self.readout_p10 == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        let probs = [
            ("p1", self.p1),
            ("p2", self.p2),
            ("readout_p01", self.readout_p01),
            ("readout_p10", self.readout_p10),
            ("jitter", self.jitter),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Invalid(format!("{name} = {p} is not in [0, 1]")));
            }
        }
        for (name, d) in [
            ("dur_1q", self.dur_1q),
            ("dur_2q", self.dur_2q),
            ("dur_meas", self.dur_meas),
        ] {
            if !(d >= 0.0 && d.is_finite()) {
                return Err(Error::Invalid(format!("{name} = {d} must be finite and >= 0")));
            }
        }
        for (name, t) in [("t1", self.t1), ("t2", self.t2)] {
            if let Some(t) = t {
                if !(t > 0.0) {
                    return Err(Error::Invalid(format!("{name} = {t} must be positive")));
                }
            }
        }
        if let (Some(t1), Some(t2)) = (self.t1, self.t2) {
            if t2 > 2.0 * t1 {
                return Err(Error::Invalid(format!(
                    "t2 = {t2} exceeds 2 * t1 = {}",
                    2.0 * t1
                )));
            }
        }
        Ok(())
    }

    /// Short stable hash of the parameters, used to tag result rows.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_string(self).expect("noise model serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest[..6].iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Coherence times of `wire` with jitter applied.
    pub fn coherence(&self, wire: usize) -> Coherence {
        let factor = if self.jitter > 0.0 {
            let u = (rng::derive_key(self.jitter_seed, &[wire as u64]) >> 11) as f64
                / (1u64 << 53) as f64;
            1.0 + self.jitter * (2.0 * u - 1.0)
        } else {
            1.0
        };
        Coherence {
            t1: self.t1.map(|t| t * factor),
            t2: self.t2.map(|t| t * factor),
        }
    }
}

/// Depolarizing error after a gate on `wires` (one or two of them).
///
/// With probability `p1` (one wire) or `p2` (two wires) a uniformly chosen
/// non-identity Pauli is applied.
pub fn apply_gate_noise<S: QuantumState, R: Rng + ?Sized>(
    state: &mut S,
    wires: &[usize],
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<()> {
    match wires {
        [w] => {
            if noise.p1 > 0.0 && rng.random::<f64>() < noise.p1 {
                state.apply_pauli(*w, Pauli::ALL[rng.random_range(0..3)])?;
            }
        }
        [a, b] => {
            if noise.p2 > 0.0 && rng.random::<f64>() < noise.p2 {
                let k = rng.random_range(1..16usize);
                for (wire, idx) in [(*a, k & 3), (*b, k >> 2)] {
                    if idx > 0 {
                        state.apply_pauli(wire, Pauli::ALL[idx - 1])?;
                    }
                }
            }
        }
        _ => {
            return Err(Error::Structure(format!(
                "gate noise on {} wires",
                wires.len()
            )))
        }
    }
    Ok(())
}

/// Decoherence accumulated while `wire` waits for `idle` time units.
pub fn apply_idle_noise<S: QuantumState, R: Rng + ?Sized>(
    state: &mut S,
    wire: usize,
    idle: f64,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<()> {
    apply_idle_with(state, wire, idle, noise.coherence(wire), rng)
}

/// Idle channel for known coherence times.
///
/// Relaxation is sampled as a reset to `|0>` with probability
/// `1 - exp(-t/t1)`. A reset already shrinks coherences by `exp(-t/t1)`, so
/// the phase flip only supplies the remaining `exp(-t/t2 + t/t1)`.
pub fn apply_idle_with<S: QuantumState, R: Rng + ?Sized>(
    state: &mut S,
    wire: usize,
    idle: f64,
    coh: Coherence,
    rng: &mut R,
) -> Result<()> {
    if idle <= 0.0 {
        return Ok(());
    }
    let decay1 = coh.t1.map_or(1.0, |t1| (-idle / t1).exp());
    if decay1 < 1.0 && rng.random::<f64>() < 1.0 - decay1 {
        let one = sample_bit(state.prob_one(wire), rng);
        state.collapse(wire, one)?;
        if one {
            state.apply_pauli(wire, Pauli::X)?;
        }
    }
    let decay2 = coh.t2.map_or(1.0, |t2| (-idle / t2).exp());
    let p_z = ((1.0 - decay2 / decay1) / 2.0).max(0.0);
    if p_z > 0.0 && rng.random::<f64>() < p_z {
        state.apply_pauli(wire, Pauli::Z)?;
    }
    Ok(())
}

/// Assignment error on a measured bit.
pub fn flip_readout<R: Rng + ?Sized>(bit: bool, noise: &NoiseModel, rng: &mut R) -> bool {
    let p = if bit {
        noise.readout_p01
    } else {
        noise.readout_p10
    };
    if p > 0.0 && rng.random::<f64>() < p {
        !bit
    } else {
        bit
    }
}
