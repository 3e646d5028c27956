use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transpile::MethodKind;

/// Angles closer than this are treated as equal when pairing rows.
pub const THETA_MATCH: f64 = 1e-9;

/// Angle of the violation point.
pub const THETA_NDC: f64 = PI / 4.0;
/// Angle of the classical-disturbance control.
pub const THETA_CD: f64 = PI;

const FOOTER: &str = "Passing rows separate the violation from the disturbance control by \
three combined standard deviations; reading that as 99.7% confidence assumes Gaussian \
fluctuations of the per-run estimates.";

/// One benchmark point as written to the results CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub method: MethodKind,
    pub n: usize,
    pub theta: f64,
    pub v_mean: f64,
    pub v_sigma: f64,
    pub n_runs: usize,
    pub n_shots: u64,
    pub seed: u64,
    pub noise_fingerprint: String,
}

/// Violation and control for one qubit count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub n: usize,
    pub v_ndc: f64,
    pub sigma_ndc: f64,
    pub v_cd: f64,
    pub sigma_cd: f64,
    /// `v_ndc - |v_cd| - 3 sqrt(sigma_ndc² + sigma_cd²)`.
    pub discriminant: f64,
}

impl MetricRow {
    pub fn new(n: usize, v_ndc: f64, sigma_ndc: f64, v_cd: f64, sigma_cd: f64) -> Self {
        let discriminant = v_ndc - v_cd.abs() - 3.0 * sigma_ndc.hypot(sigma_cd);
        MetricRow {
            n,
            v_ndc,
            sigma_ndc,
            v_cd,
            sigma_cd,
            discriminant,
        }
    }

    pub fn passes(&self) -> bool {
        self.discriminant >= 0.0
    }
}

/// N_NDC for one method.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub method: MethodKind,
    pub rows: Vec<MetricRow>,
    /// Largest passing N, wherever it sits.
    pub n_ndc: Option<usize>,
    /// Last N of the passing run that starts at the smallest N.
    pub n_ndc_contiguous: Option<usize>,
    pub require_contiguous: bool,
    /// Rows that pass although a smaller N failed.
    pub non_contiguous: Vec<usize>,
    /// Mean control value and its spread over all N.
    pub mean_v_cd: f64,
    pub sigma_v_cd: f64,
    pub footer: String,
}

impl MetricReport {
    /// The value selected by `require_contiguous`.
    pub fn metric(&self) -> Option<usize> {
        if self.require_contiguous {
            self.n_ndc_contiguous
        } else {
            self.n_ndc
        }
    }

    /// `self.metric() / other.metric()`, for comparing methods or devices.
    pub fn ratio_to(&self, other: &MetricReport) -> Option<f64> {
        match (self.metric(), other.metric()) {
            (Some(a), Some(b)) if b > 0 => Some(a as f64 / b as f64),
            _ => None,
        }
    }

    /// Human-readable summary.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let fmt = |v: Option<usize>| v.map_or("none".to_string(), |n| n.to_string());
        let _ = writeln!(s, "method {}", self.method);
        let _ = writeln!(s, "  N_NDC = {}", fmt(self.n_ndc));
        let _ = writeln!(s, "  N_NDC (contiguous) = {}", fmt(self.n_ndc_contiguous));
        if !self.non_contiguous.is_empty() {
            let _ = writeln!(s, "  passing after a failure: {:?}", self.non_contiguous);
        }
        let _ = writeln!(
            s,
            "  mean V_CD = {:.4} ± {:.4}",
            self.mean_v_cd, self.sigma_v_cd
        );
        let _ = writeln!(s, "  {}", self.footer);
        s
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < THETA_MATCH
}

/// Applies the three-sigma rule to the π/4 rows against the π controls of
/// one method.
///
/// Every N between the smallest and largest present must carry both
/// angles.
pub fn compute_n_ndc(
    method: MethodKind,
    rows: &[ResultRow],
    require_contiguous: bool,
) -> Result<MetricReport> {
    let mut ndc: BTreeMap<usize, &ResultRow> = BTreeMap::new();
    let mut cd: BTreeMap<usize, &ResultRow> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.method == method) {
        let slot = if close(r.theta, THETA_NDC) {
            &mut ndc
        } else if close(r.theta, THETA_CD) {
            &mut cd
        } else {
            continue;
        };
        if slot.insert(r.n, r).is_some() {
            return Err(Error::Schema(format!(
                "duplicate row for {method} N={} θ={}",
                r.n, r.theta
            )));
        }
    }
    let (Some(&lo), Some(&hi)) = (ndc.keys().next(), ndc.keys().next_back()) else {
        return Err(Error::Schema(format!("no θ=π/4 rows for {method}")));
    };
    let mut out = Vec::new();
    for n in lo..=hi {
        let a = ndc
            .get(&n)
            .ok_or_else(|| Error::Schema(format!("{method}: N={n} missing between {lo} and {hi}")))?;
        let b = cd
            .get(&n)
            .ok_or_else(|| Error::Schema(format!("{method}: N={n} has no θ=π control row")))?;
        out.push(MetricRow::new(n, a.v_mean, a.v_sigma, b.v_mean, b.v_sigma));
    }
    if let Some(extra) = cd.keys().find(|n| !ndc.contains_key(n)) {
        return Err(Error::Schema(format!(
            "{method}: control row at N={extra} without a θ=π/4 row"
        )));
    }
    let n_ndc = out.iter().filter(|r| r.passes()).map(|r| r.n).max();
    let n_ndc_contiguous = out
        .iter()
        .take_while(|r| r.passes())
        .map(|r| r.n)
        .last();
    let first_fail = out.iter().find(|r| !r.passes()).map(|r| r.n);
    let non_contiguous = out
        .iter()
        .filter(|r| r.passes() && first_fail.is_some_and(|f| r.n > f))
        .map(|r| r.n)
        .collect();
    let k = out.len() as f64;
    let mean_v_cd = out.iter().map(|r| r.v_cd).sum::<f64>() / k;
    let sigma_v_cd = if out.len() > 1 {
        (out.iter().map(|r| (r.v_cd - mean_v_cd).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(MetricReport {
        method,
        rows: out,
        n_ndc,
        n_ndc_contiguous,
        require_contiguous,
        non_contiguous,
        mean_v_cd,
        sigma_v_cd,
        footer: FOOTER.to_string(),
    })
}

/// Results CSV with a fixed header.
pub fn write_results_csv(rows: &[ResultRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    if rows.is_empty() {
        w.write_record(RESULT_HEADER).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Schema(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub const RESULT_HEADER: [&str; 9] = [
    "method",
    "n",
    "theta",
    "v_mean",
    "v_sigma",
    "n_runs",
    "n_shots",
    "seed",
    "noise_fingerprint",
];

pub fn read_results_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().ne(RESULT_HEADER.iter().copied()) {
        return Err(Error::Schema(format!(
            "unexpected results header `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}

/// Column order of the metric CSV.
pub const METRIC_HEADER: [&str; 9] = [
    "method",
    "n",
    "v_ndc",
    "sigma_ndc",
    "v_cd",
    "sigma_cd",
    "discriminant",
    "passes",
    "contiguous",
];

/// Per-N metric table for every report, one CSV.
pub fn write_metric_csv(reports: &[MetricReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(METRIC_HEADER).map_err(csv_err)?;
    for rep in reports {
        let prefix = rep.n_ndc_contiguous.unwrap_or(0);
        for row in &rep.rows {
            w.write_record([
                rep.method.to_string(),
                row.n.to_string(),
                row.v_ndc.to_string(),
                row.sigma_ndc.to_string(),
                row.v_cd.to_string(),
                row.sigma_cd.to_string(),
                row.discriminant.to_string(),
                row.passes().to_string(),
                (row.passes() && row.n <= prefix).to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Schema(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse {
        line,
        token: String::new(),
        message: e.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(n: usize, theta: f64, v: f64, s: f64) -> ResultRow {
        ResultRow {
            method: MethodKind::HMethod,
            n,
            theta,
            v_mean: v,
            v_sigma: s,
            n_runs: 20,
            n_shots: 4000,
            seed: 1,
            noise_fingerprint: "abc".into(),
        }
    }

    fn table(vs: &[(usize, f64)]) -> Vec<ResultRow> {
        vs.iter()
            .flat_map(|&(n, v)| [row(n, THETA_NDC, v, 0.01), row(n, THETA_CD, 0.0, 0.01)])
            .collect()
    }

    #[test]
    fn rule_picks_the_largest_passing_n() {
        let rows = table(&[(2, 0.2), (3, 0.1), (4, 0.01), (5, 0.05), (6, 0.0)]);
        let r = compute_n_ndc(MethodKind::HMethod, &rows, false).unwrap();
        assert_eq!(r.n_ndc, Some(5));
        assert_eq!(r.n_ndc_contiguous, Some(3));
        assert_eq!(r.non_contiguous, vec![5]);
        let strict = compute_n_ndc(MethodKind::HMethod, &rows, true).unwrap();
        assert_eq!(strict.metric(), Some(3));
    }

    #[test]
    fn zero_everywhere_gives_none() {
        let rows = table(&[(2, 0.0), (3, 0.0)]);
        let r = compute_n_ndc(MethodKind::HMethod, &rows, false).unwrap();
        assert_eq!(r.n_ndc, None);
    }

    #[test]
    fn discriminant_formula() {
        let r = MetricRow::new(4, 0.25, 0.03, -0.01, 0.04);
        assert!((r.discriminant - (0.25 - 0.01 - 0.15)).abs() < 1e-15);
    }

    #[test]
    fn gaps_and_missing_controls_are_errors() {
        let mut rows = table(&[(2, 0.2), (4, 0.2)]);
        assert!(matches!(
            compute_n_ndc(MethodKind::HMethod, &rows, false),
            Err(Error::Schema(_))
        ));
        rows = table(&[(2, 0.2), (3, 0.2)]);
        rows.pop();
        assert!(matches!(
            compute_n_ndc(MethodKind::HMethod, &rows, false),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn csv_round_trip_and_header() {
        let rows = table(&[(2, 0.2), (3, 0.125)]);
        let text = write_results_csv(&rows).unwrap();
        assert!(text.starts_with(
            "method,n,theta,v_mean,v_sigma,n_runs,n_shots,seed,noise_fingerprint\n"
        ));
        assert_eq!(read_results_csv(&text).unwrap(), rows);
        assert!(write_results_csv(&[]).unwrap().starts_with("method,"));
    }

    #[test]
    fn ratio() {
        let a = compute_n_ndc(MethodKind::HMethod, &table(&[(2, 0.2), (3, 0.2), (4, 0.2)]), false)
            .unwrap();
        let mut rows = table(&[(2, 0.2), (3, 0.0)]);
        for r in &mut rows {
            r.method = MethodKind::MMethod;
        }
        let b = compute_n_ndc(MethodKind::MMethod, &rows, false).unwrap();
        assert_eq!(a.ratio_to(&b), Some(2.0));
    }
}
