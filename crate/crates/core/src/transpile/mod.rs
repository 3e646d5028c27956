//! Protocol circuits, nearest-neighbour rewriting and equivalence checks.
//!
//! Two routes lead to the same optimized circuits. The generators in
//! [`build`] write them down directly for any qubit count; the passes in
//! [`passes`] derive them step by step from the long-range reference
//! circuits. Tests compare the two after [`normal_form`].

pub mod build;
mod equiv;
mod normalize;
pub mod passes;
mod pipeline;

pub use build::{
    build_lnn, build_lnn_controlled, build_reference, build_reference_controlled, LnnOptions,
    MLayout, C1, C2, CP, N_CLBITS,
};
pub use equiv::{check_equivalence, check_equivalence_on, EquivalenceVerdict};
pub use normalize::{compact, normal_form, same_up_to_commutation};
pub use pipeline::{h_pipeline, m_pipeline, H_PASSES, M_PASSES};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Which protocol variant a circuit implements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MethodKind {
    /// The parity measurement is switched off by a conditional Hadamard on
    /// the first ancilla.
    #[serde(rename = "h")]
    HMethod,
    /// The mid-circuit readout moves to an untouched wire.
    #[serde(rename = "m")]
    MMethod,
    /// The single-measurement run skips the first parity gate entirely.
    #[serde(rename = "naive-h")]
    NaiveH,
    /// The single-measurement run simply omits the mid-circuit readout.
    #[serde(rename = "naive-m")]
    NaiveM,
}

impl MethodKind {
    pub const ALL: [MethodKind; 4] = [
        MethodKind::HMethod,
        MethodKind::MMethod,
        MethodKind::NaiveH,
        MethodKind::NaiveM,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MethodKind::HMethod => "h",
            MethodKind::MMethod => "m",
            MethodKind::NaiveH => "naive-h",
            MethodKind::NaiveM => "naive-m",
        }
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        MethodKind::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                Error::Invalid(format!(
                    "unknown method `{s}` (expected h, m, naive-h or naive-m)"
                ))
            })
    }
}
