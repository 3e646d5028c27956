//! Counts files from an external source, fed through the same estimator.
//!
//! ```json
//! {
//!   "metadata": {"method": "h", "n": 4, "theta": 0.7853981633974483,
//!                "subprotocol": "double", "run": 0},
//!   "counts": {"010": 1020, "000": 980}
//! }
//! ```
//!
//! Bitstrings put clbit 0 rightmost; spaces between registers are ignored.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::metric::ResultRow;
use crate::error::{Error, Result};
use crate::protocol::{estimate_violation, NdcEstimate, OutcomeMap};
use crate::sim::OutcomeCounts;
use crate::transpile::MethodKind;

/// Fingerprint written on rows that did not come from the simulator.
pub const INGESTED: &str = "ingested";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subprotocol {
    Single,
    Double,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountsMetadata {
    pub method: MethodKind,
    pub n: usize,
    pub theta: f64,
    pub subprotocol: Subprotocol,
    #[serde(default)]
    pub run: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CountsFile {
    pub metadata: CountsMetadata,
    pub counts: OutcomeCounts,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    metadata: CountsMetadata,
    counts: BTreeMap<String, u64>,
}

pub fn parse_counts(text: &str) -> Result<CountsFile> {
    let raw: RawFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        token: format!("column {}", e.column()),
        message: e.to_string(),
    })?;
    let mut width = None;
    let mut counts = OutcomeCounts::new(0);
    for (key, &count) in &raw.counts {
        let bits: String = key.chars().filter(|c| !c.is_whitespace()).collect();
        if bits.is_empty() || bits.len() > 64 || !bits.chars().all(|c| c == '0' || c == '1') {
            return Err(Error::Schema(format!("bad bitstring `{key}`")));
        }
        if *width.get_or_insert(bits.len()) != bits.len() {
            return Err(Error::Schema(format!("bitstring `{key}` has a different width")));
        }
        let mask = u64::from_str_radix(&bits, 2).expect("checked binary digits");
        counts.n_clbits = bits.len();
        counts.add(mask, count);
    }
    if counts.total_shots == 0 {
        return Err(Error::Schema("counts are empty".into()));
    }
    Ok(CountsFile {
        metadata: raw.metadata,
        counts,
    })
}

/// Writes counts in the ingest format.
pub fn export_counts(metadata: &CountsMetadata, counts: &OutcomeCounts) -> String {
    let raw = RawFile {
        metadata: metadata.clone(),
        counts: counts.by_bitstring(),
    };
    serde_json::to_string_pretty(&raw).expect("counts serialize")
}

/// Pairs single and double counts per run and aggregates each
/// (method, n, θ) group into one row.
pub fn rows_from_counts(files: &[CountsFile], map: &OutcomeMap) -> Result<Vec<ResultRow>> {
    type Key = (MethodKind, usize, u64);
    let mut groups: BTreeMap<Key, BTreeMap<usize, [Option<&OutcomeCounts>; 2]>> = BTreeMap::new();
    for f in files {
        let m = &f.metadata;
        let slot = groups
            .entry((m.method, m.n, m.theta.to_bits()))
            .or_default()
            .entry(m.run)
            .or_default();
        let i = (m.subprotocol == Subprotocol::Double) as usize;
        if slot[i].replace(&f.counts).is_some() {
            return Err(Error::Schema(format!(
                "two {:?} files for {} N={} θ={} run {}",
                m.subprotocol, m.method, m.n, m.theta, m.run
            )));
        }
    }
    let mut rows = Vec::new();
    for ((method, n, theta_bits), runs) in groups {
        let theta = f64::from_bits(theta_bits);
        let mut per_run = Vec::new();
        let mut shots = 0;
        for (run, pair) in runs {
            let [Some(single), Some(double)] = pair else {
                return Err(Error::Schema(format!(
                    "{method} N={n} θ={theta} run {run} lacks its single or double counts"
                )));
            };
            shots = shots.max(single.total_shots);
            per_run.push(estimate_violation(single, double, map)?);
        }
        let est = NdcEstimate::from_runs(per_run, shots)?;
        rows.push(ResultRow {
            method,
            n,
            theta,
            v_mean: est.v,
            v_sigma: est.sigma,
            n_runs: est.n_runs,
            n_shots: shots,
            seed: 0,
            noise_fingerprint: INGESTED.into(),
        });
    }
    Ok(rows)
}

/// Reads counts files from disk and turns them into result rows.
pub fn ingest_counts<P: AsRef<Path>>(paths: &[P], map: &OutcomeMap) -> Result<Vec<ResultRow>> {
    let files = paths
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p)?;
            parse_counts(&text).map_err(|e| match e {
                Error::Parse { line, token, message } => Error::Parse {
                    line,
                    token,
                    message: format!("{}: {message}", p.as_ref().display()),
                },
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows_from_counts(&files, map)
}
