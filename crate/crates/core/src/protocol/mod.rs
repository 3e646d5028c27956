//! The parity no-disturbance test: closed-form predictions, the violation
//! estimator, and the paired single/double sub-protocol runs.

mod run;

pub use run::{exact_violation, run_point, theta_sweep, CircuitForm, NdcEstimate, RunConfig, SweepPoint};

use serde::{Deserialize, Serialize};

use crate::circuit::ClbitId;
use crate::error::{Error, Result};
use crate::sim::{OutcomeCounts, OutcomeDistribution};
use crate::transpile::{C1, C2};

/// `V = 1/4 [1 - cos(2θ)^n]`.
pub fn ideal_violation(theta: f64, n: usize) -> f64 {
    0.25 * (1.0 - (2.0 * theta).cos().powi(n as i32))
}

/// Probabilities of even and odd parity at the first readout.
pub fn ideal_first_parity(theta: f64, n: usize) -> (f64, f64) {
    let c = theta.cos().powi(n as i32);
    (0.5 + 0.5 * c, 0.5 - 0.5 * c)
}

/// Outcome label of a parity readout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

/// Where the parity outcomes live in a shot record and which bit value is
/// read as `+`.
///
/// The default reads a 1 on the final ancilla (odd parity) as `+`, which
/// makes the estimator reproduce `ideal_violation` with its sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeMap {
    /// Bit holding the final parity readout.
    pub final_bit: ClbitId,
    /// Bit holding the mid-circuit readout in the double sub-protocol, if
    /// the data carries it.
    pub first_bit: Option<ClbitId>,
    /// Bit value read as the `+` outcome.
    pub plus_bit: bool,
}

impl Default for OutcomeMap {
    fn default() -> Self {
        OutcomeMap {
            final_bit: C2,
            first_bit: Some(C1),
            plus_bit: true,
        }
    }
}

impl OutcomeMap {
    /// Classical bit value that encodes `sign`.
    pub fn bit_for(&self, sign: Sign) -> bool {
        (sign == Sign::Plus) == self.plus_bit
    }

    fn check(&self, counts: &OutcomeCounts, double: bool) -> Result<()> {
        if counts.total_shots == 0 {
            return Err(Error::Schema("empty counts".into()));
        }
        let mut bits = vec![self.final_bit];
        if double {
            bits.extend(self.first_bit);
        }
        for b in bits {
            if b >= counts.n_clbits {
                return Err(Error::Schema(format!(
                    "counts have {} bits, outcome map needs bit {b}",
                    counts.n_clbits
                )));
            }
        }
        Ok(())
    }
}

/// `V_+ = P_2(+) - [P_12(+,+) + P_12(-,+)]` from single and double counts.
pub fn estimate_violation(
    single: &OutcomeCounts,
    double: &OutcomeCounts,
    map: &OutcomeMap,
) -> Result<f64> {
    estimate_violation_for(single, double, map, Sign::Plus)
}

/// The estimator for either final outcome. `V_-` is exactly `-V_+`.
pub fn estimate_violation_for(
    single: &OutcomeCounts,
    double: &OutcomeCounts,
    map: &OutcomeMap,
    outcome: Sign,
) -> Result<f64> {
    map.check(single, false)?;
    map.check(double, true)?;
    let v = map.bit_for(outcome);
    Ok(single.marginal(map.final_bit, v)? - double.marginal(map.final_bit, v)?)
}

/// The estimator evaluated on exact distributions.
pub fn violation_from_distributions(
    single: &OutcomeDistribution,
    double: &OutcomeDistribution,
    map: &OutcomeMap,
) -> Result<f64> {
    for d in [single, double] {
        if map.final_bit >= d.n_clbits {
            return Err(Error::Schema(format!(
                "distribution has {} bits, outcome map needs bit {}",
                d.n_clbits, map.final_bit
            )));
        }
    }
    let v = map.bit_for(Sign::Plus);
    Ok(single.marginal(map.final_bit, v) - double.marginal(map.final_bit, v))
}
