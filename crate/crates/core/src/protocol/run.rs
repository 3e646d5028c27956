use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{estimate_violation, ideal_violation, violation_from_distributions, OutcomeMap};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::sim::{exact_distribution_with, rng, run_shots_with, ExactOptions, ShotOptions};
use crate::transpile::{build_lnn, build_reference, LnnOptions, MethodKind};

/// Which circuit family is executed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CircuitForm {
    /// Optimized nearest-neighbour circuits with every two-qubit gate
    /// adjacent.
    #[default]
    Lnn,
    /// The long-range circuits as first written down.
    Reference,
}

impl CircuitForm {
    /// Single (`measured = false`) or double sub-protocol circuit.
    pub fn build(self, method: MethodKind, n: usize, theta: f64, measured: bool) -> Result<Circuit> {
        match self {
            CircuitForm::Lnn => build_lnn(method, n, theta, measured, LnnOptions::physical()),
            CircuitForm::Reference => build_reference(method, n, theta, measured),
        }
    }
}

/// Repetition and seeding for one protocol point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunConfig {
    pub n_runs: usize,
    pub n_shots: u64,
    pub seed: u64,
    pub form: CircuitForm,
    pub map: OutcomeMap,
    pub shot_options: ShotOptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n_runs: 20,
            n_shots: 4000,
            seed: 0,
            form: CircuitForm::Lnn,
            map: OutcomeMap::default(),
            shot_options: ShotOptions::default(),
        }
    }
}

/// Violation averaged over runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NdcEstimate {
    pub v: f64,
    /// Sample standard deviation of the per-run values.
    pub sigma: f64,
    pub per_run_v: Vec<f64>,
    pub n_runs: usize,
    pub n_shots_per_run: u64,
}

impl NdcEstimate {
    pub fn from_runs(per_run_v: Vec<f64>, n_shots_per_run: u64) -> Result<Self> {
        let k = per_run_v.len();
        if k == 0 {
            return Err(Error::Invalid("no runs to aggregate".into()));
        }
        let v = per_run_v.iter().sum::<f64>() / k as f64;
        let sigma = if k > 1 {
            (per_run_v.iter().map(|x| (x - v).powi(2)).sum::<f64>() / (k - 1) as f64).sqrt()
        } else {
            0.0
        };
        Ok(NdcEstimate {
            v,
            sigma,
            per_run_v,
            n_runs: k,
            n_shots_per_run,
        })
    }
}

/// One point of a θ sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub theta: f64,
    pub n: usize,
    pub method: MethodKind,
    pub estimate: NdcEstimate,
    pub ideal_v: f64,
}

fn method_id(method: MethodKind) -> u64 {
    MethodKind::ALL.iter().position(|m| *m == method).unwrap() as u64
}

/// Stream key for one sub-protocol of one run.
pub(crate) fn run_key(seed: u64, method: MethodKind, n: usize, theta: f64, run: usize, double: bool) -> u64 {
    rng::derive_key(
        seed,
        &[method_id(method), n as u64, theta.to_bits(), run as u64, double as u64],
    )
}

/// Noiseless violation from the exact branch oracle.
pub fn exact_violation(method: MethodKind, n: usize, theta: f64, form: CircuitForm) -> Result<f64> {
    let single = exact_distribution_with(&form.build(method, n, theta, false)?, ExactOptions::default())?;
    let double = exact_distribution_with(&form.build(method, n, theta, true)?, ExactOptions::default())?;
    violation_from_distributions(&single, &double, &OutcomeMap::default())
}

/// Runs both sub-protocols `n_runs` times and aggregates the per-run
/// violations.
pub fn run_point(
    method: MethodKind,
    n: usize,
    theta: f64,
    noise: &NoiseModel,
    cfg: &RunConfig,
) -> Result<NdcEstimate> {
    if cfg.n_runs == 0 {
        return Err(Error::Invalid("n_runs must be at least 1".into()));
    }
    noise.validate()?;
    let single = cfg.form.build(method, n, theta, false)?;
    let double = cfg.form.build(method, n, theta, true)?;
    let noise = (!noise.is_ideal()).then_some(noise);
    let per_run = (0..cfg.n_runs)
        .map(|run| {
            let s = run_shots_with(
                &single,
                noise,
                cfg.n_shots,
                run_key(cfg.seed, method, n, theta, run, false),
                cfg.shot_options,
            )?;
            let d = run_shots_with(
                &double,
                noise,
                cfg.n_shots,
                run_key(cfg.seed, method, n, theta, run, true),
                cfg.shot_options,
            )?;
            estimate_violation(&s, &d, &cfg.map)
        })
        .collect::<Result<Vec<_>>>()?;
    NdcEstimate::from_runs(per_run, cfg.n_shots)
}

/// `run_point` over a grid of angles, paired with the ideal value.
pub fn theta_sweep(
    method: MethodKind,
    n: usize,
    thetas: &[f64],
    noise: &NoiseModel,
    cfg: &RunConfig,
) -> Result<Vec<SweepPoint>> {
    if thetas.is_empty() {
        return Err(Error::Invalid("empty θ grid".into()));
    }
    thetas
        .par_iter()
        .map(|&theta| {
            Ok(SweepPoint {
                theta,
                n,
                method,
                estimate: run_point(method, n, theta, noise, cfg)?,
                ideal_v: ideal_violation(theta, n),
            })
        })
        .collect()
}
