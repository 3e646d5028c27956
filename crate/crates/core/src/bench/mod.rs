//! Benchmark campaigns: N sweeps at the violation and control angles, the
//! N_NDC metric, and the files they produce.

mod config;
mod ingest;
mod metric;

pub use config::{parse_angle, ExperimentConfig};
pub use ingest::{
    export_counts, ingest_counts, parse_counts, rows_from_counts, CountsFile, CountsMetadata,
    Subprotocol, INGESTED,
};
pub use metric::{
    compute_n_ndc, read_results_csv, write_metric_csv, write_results_csv, MetricReport, MetricRow,
    ResultRow, METRIC_HEADER, RESULT_HEADER, THETA_CD, THETA_MATCH, THETA_NDC,
};

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::protocol::run_point;

/// Everything a campaign produced.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkOutput {
    pub rows: Vec<ResultRow>,
    pub reports: Vec<MetricReport>,
    /// Skipped sizes and other remarks.
    pub notes: Vec<String>,
}

impl BenchmarkOutput {
    pub fn summary(&self, config: &ExperimentConfig) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "N = {}..={}, {} runs x {} shots, seed {}, noise {}",
            config.n_min,
            config.n_max,
            config.n_runs,
            config.n_shots,
            config.seed,
            config.noise.fingerprint()
        );
        for r in &self.reports {
            s.push_str(&r.summary());
        }
        for (i, a) in self.reports.iter().enumerate() {
            for b in &self.reports[i + 1..] {
                if let Some(ratio) = a.ratio_to(b) {
                    let _ = writeln!(s, "ratio N_NDC({}) / N_NDC({}) = {ratio:.3}", a.method, b.method);
                }
            }
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        s
    }
}

fn has_theta(config: &ExperimentConfig, theta: f64) -> bool {
    config.thetas.iter().any(|t| (t - theta).abs() < THETA_MATCH)
}

fn run_inner(config: &ExperimentConfig) -> Result<BenchmarkOutput> {
    let cfg = config.run_config();
    let fingerprint = config.noise.fingerprint();
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for &method in &config.methods {
        for n in config.n_min..=config.n_max {
            let points: Result<Vec<ResultRow>> = config
                .thetas
                .par_iter()
                .map(|&theta| {
                    let est = run_point(method, n, theta, &config.noise, &cfg)?;
                    Ok(ResultRow {
                        method,
                        n,
                        theta,
                        v_mean: est.v,
                        v_sigma: est.sigma,
                        n_runs: est.n_runs,
                        n_shots: est.n_shots_per_run,
                        seed: config.seed,
                        noise_fingerprint: fingerprint.clone(),
                    })
                })
                .collect();
            match points {
                Ok(p) => rows.extend(p),
                Err(Error::Resource(why)) => {
                    notes.push(format!(
                        "{method}: N={n} exceeded a resource limit ({why}); N={n}..={} skipped",
                        config.n_max
                    ));
                    break;
                }
                Err(e) => return Err(e),
            }
        }
    }
    let mut reports = Vec::new();
    if has_theta(config, THETA_NDC) && has_theta(config, THETA_CD) {
        for &method in &config.methods {
            if rows.iter().any(|r| r.method == method) {
                reports.push(compute_n_ndc(method, &rows, config.require_contiguous)?);
            }
        }
    } else {
        notes.push("θ list lacks π/4 or π; no N_NDC computed".into());
    }
    Ok(BenchmarkOutput {
        rows,
        reports,
        notes,
    })
}

/// Runs every (method, N, θ) point of the campaign.
///
/// Each point draws from streams keyed by (seed, method, N, θ, run), so the
/// output does not depend on the worker count. A resource failure at some
/// N ends that method's sweep and is recorded in `notes`.
pub fn run_benchmark(config: &ExperimentConfig) -> Result<BenchmarkOutput> {
    config.validate()?;
    if config.workers == 0 {
        return run_inner(config);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Resource(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run_inner(config))
}

/// Writes `results.csv`, `metric.csv` and `summary.txt` into `dir`.
pub fn write_outputs(
    output: &BenchmarkOutput,
    config: &ExperimentConfig,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let files = [
        ("results.csv", write_results_csv(&output.rows)?),
        ("metric.csv", write_metric_csv(&output.reports)?),
        ("summary.txt", output.summary(config)),
    ];
    let mut written = Vec::new();
    for (name, body) in files {
        let path = dir.join(name);
        std::fs::write(&path, body)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::NoiseModel;
    use crate::transpile::MethodKind;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            methods: vec![MethodKind::HMethod],
            n_min: 2,
            n_max: 4,
            n_runs: 4,
            n_shots: 500,
            seed: 3,
            noise: NoiseModel::ideal(),
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn noiseless_minimal_campaign() {
        let out = run_benchmark(&small()).unwrap();
        assert_eq!(out.rows.len(), 6);
        assert_eq!(out.reports.len(), 1);
        assert_eq!(out.reports[0].n_ndc, Some(4));
        assert!(out.notes.is_empty());
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let mut a = small();
        a.workers = 1;
        let mut b = small();
        b.workers = 3;
        let ra = write_results_csv(&run_benchmark(&a).unwrap().rows).unwrap();
        let rb = write_results_csv(&run_benchmark(&b).unwrap().rows).unwrap();
        assert_eq!(ra, rb);
    }

    #[test]
    fn oversized_n_is_skipped_with_a_note() {
        let mut c = small();
        c.n_min = 62;
        c.n_max = 63;
        c.n_runs = 1;
        c.n_shots = 1;
        c.thetas = vec![THETA_NDC, THETA_CD];
        let out = run_benchmark(&c).unwrap();
        assert!(out.rows.iter().all(|r| r.n == 62) && out.rows.len() == 2);
        assert_eq!(out.notes.len(), 1, "{:?}", out.notes);
    }
}
