use std::collections::BTreeMap;

use crate::circuit::ClbitId;
use crate::error::{Error, Result};

/// Renders a bit mask with clbit 0 rightmost.
pub fn bits_to_string(bits: u64, n_clbits: usize) -> String {
    (0..n_clbits)
        .rev()
        .map(|i| if (bits >> i) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Classical bits left by one shot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShotRecord {
    pub clbit_values: Vec<bool>,
}

impl ShotRecord {
    pub fn from_mask(mask: u64, n_clbits: usize) -> Self {
        ShotRecord {
            clbit_values: (0..n_clbits).map(|i| (mask >> i) & 1 == 1).collect(),
        }
    }

    pub fn mask(&self) -> u64 {
        self.clbit_values
            .iter()
            .enumerate()
            .fold(0, |m, (i, &b)| m | (u64::from(b) << i))
    }
}

/// Histogram of shot outcomes keyed by clbit mask.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct OutcomeCounts {
    pub n_clbits: usize,
    pub counts: BTreeMap<u64, u64>,
    pub total_shots: u64,
}

impl OutcomeCounts {
    pub fn new(n_clbits: usize) -> Self {
        OutcomeCounts {
            n_clbits,
            counts: BTreeMap::new(),
            total_shots: 0,
        }
    }

    pub fn record(&mut self, mask: u64) {
        self.add(mask, 1);
    }

    pub fn add(&mut self, mask: u64, count: u64) {
        if count > 0 {
            *self.counts.entry(mask).or_insert(0) += count;
            self.total_shots += count;
        }
    }

    /// Combines two histograms; the result does not depend on the order.
    pub fn merge(&mut self, other: &OutcomeCounts) {
        self.n_clbits = self.n_clbits.max(other.n_clbits);
        for (&k, &v) in &other.counts {
            self.add(k, v);
        }
    }

    pub fn get(&self, mask: u64) -> u64 {
        self.counts.get(&mask).copied().unwrap_or(0)
    }

    /// Fraction of shots with `bit` equal to `value`.
    pub fn marginal(&self, bit: ClbitId, value: bool) -> Result<f64> {
        if bit >= self.n_clbits {
            return Err(Error::Schema(format!(
                "clbit {bit} not present in counts over {} bits",
                self.n_clbits
            )));
        }
        if self.total_shots == 0 {
            return Err(Error::Schema("empty counts".into()));
        }
        let hits: u64 = self
            .counts
            .iter()
            .filter(|(k, _)| ((*k >> bit) & 1 == 1) == value)
            .map(|(_, v)| v)
            .sum();
        Ok(hits as f64 / self.total_shots as f64)
    }

    /// Counts keyed by bitstring (clbit 0 rightmost).
    pub fn by_bitstring(&self) -> BTreeMap<String, u64> {
        self.counts
            .iter()
            .map(|(&k, &v)| (bits_to_string(k, self.n_clbits), v))
            .collect()
    }
}

/// Exact outcome probabilities keyed by clbit mask.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct OutcomeDistribution {
    pub n_clbits: usize,
    pub probs: BTreeMap<u64, f64>,
}

impl OutcomeDistribution {
    pub fn new(n_clbits: usize) -> Self {
        OutcomeDistribution {
            n_clbits,
            probs: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, mask: u64, p: f64) {
        *self.probs.entry(mask).or_insert(0.0) += p;
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    pub fn prob(&self, mask: u64) -> f64 {
        self.probs.get(&mask).copied().unwrap_or(0.0)
    }

    pub fn marginal(&self, bit: ClbitId, value: bool) -> f64 {
        self.probs
            .iter()
            .filter(|(k, _)| ((*k >> bit) & 1 == 1) == value)
            .map(|(_, p)| p)
            .sum()
    }

    /// Distribution over a subset of bits; the `i`th listed bit becomes bit
    /// `i` of the new key.
    pub fn project(&self, bits: &[ClbitId]) -> OutcomeDistribution {
        let mut out = OutcomeDistribution::new(bits.len());
        for (&k, &p) in &self.probs {
            let key = bits
                .iter()
                .enumerate()
                .fold(0u64, |m, (i, &b)| m | (((k >> b) & 1) << i));
            out.add(key, p);
        }
        out
    }

    /// Largest absolute difference over the union of outcomes.
    pub fn max_deviation(&self, other: &OutcomeDistribution) -> f64 {
        self.probs
            .keys()
            .chain(other.probs.keys())
            .map(|k| (self.prob(*k) - other.prob(*k)).abs())
            .fold(0.0, f64::max)
    }
}
