use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::protocol::{CircuitForm, RunConfig};
use crate::transpile::MethodKind;

/// One benchmark campaign.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub methods: Vec<MethodKind>,
    pub n_min: usize,
    pub n_max: usize,
    /// Angles in radians, or strings such as `"pi/4"`. The metric needs
    /// π/4 and π among them.
    #[serde(deserialize_with = "angles")]
    pub thetas: Vec<f64>,
    pub n_runs: usize,
    pub n_shots: u64,
    pub seed: u64,
    pub form: CircuitForm,
    /// Stop the metric at the first failing N instead of taking the largest
    /// passing one.
    pub require_contiguous: bool,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
    pub output: PathBuf,
    pub noise: NoiseModel,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            methods: vec![MethodKind::HMethod, MethodKind::MMethod],
            n_min: 2,
            n_max: 12,
            thetas: vec![PI / 4.0, PI],
            n_runs: 20,
            n_shots: 4000,
            seed: 0,
            form: CircuitForm::Lnn,
            require_contiguous: false,
            workers: 0,
            output: PathBuf::from("results"),
            noise: NoiseModel::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::Invalid("no methods selected".into()));
        }
        if self.n_min < 2 || self.n_max < self.n_min {
            return Err(Error::Invalid(format!(
                "N range {}..={} is empty or starts below 2",
                self.n_min, self.n_max
            )));
        }
        if self.thetas.is_empty() || self.thetas.iter().any(|t| !t.is_finite()) {
            return Err(Error::Invalid("θ list must be nonempty and finite".into()));
        }
        if self.n_runs == 0 || self.n_shots == 0 {
            return Err(Error::Invalid("n_runs and n_shots must be positive".into()));
        }
        self.noise.validate()
    }

    pub fn run_config(&self) -> RunConfig {
        RunConfig {
            n_runs: self.n_runs,
            n_shots: self.n_shots,
            seed: self.seed,
            form: self.form,
            ..RunConfig::default()
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
                .unwrap_or(0);
            Error::Parse {
                line,
                token: e
                    .span()
                    .map(|s| text.get(s).unwrap_or("").to_string())
                    .unwrap_or_default(),
                message: e.message().to_string(),
            }
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }
}

fn angles<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Vec<f64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Angle {
        Radians(f64),
        Text(String),
    }
    Vec::<Angle>::deserialize(d)?
        .into_iter()
        .map(|a| match a {
            Angle::Radians(r) => Ok(r),
            Angle::Text(t) => parse_angle(&t).map_err(serde::de::Error::custom),
        })
        .collect()
}

/// Parses an angle such as `0.785`, `pi`, `pi/4`, `3pi/4` or `3*pi/4`.
pub fn parse_angle(s: &str) -> Result<f64> {
    let t = s.trim().to_ascii_lowercase().replace(['*', ' '], "");
    let bad = || Error::Invalid(format!("cannot read angle `{s}`"));
    if let Some(idx) = t.find("pi") {
        let coef = match &t[..idx] {
            "" => 1.0,
            "-" => -1.0,
            c => c.parse::<f64>().map_err(|_| bad())?,
        };
        let rest = &t[idx + 2..];
        let div = match rest.strip_prefix('/') {
            Some(d) => d.parse::<f64>().map_err(|_| bad())?,
            None if rest.is_empty() => 1.0,
            None => return Err(bad()),
        };
        Ok(coef * PI / div)
    } else {
        t.parse::<f64>().map_err(|_| bad())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles_may_be_written_as_text() {
        let c = ExperimentConfig::from_toml("thetas = [\"pi/4\", 3.141592653589793, \"3pi/4\"]").unwrap();
        assert_eq!(c.thetas, vec![PI / 4.0, PI, 3.0 * PI / 4.0]);
        assert!(ExperimentConfig::from_toml("thetas = [\"quarter\"]").is_err());
    }

    #[test]
    fn toml_round_trip() {
        let mut c = ExperimentConfig::default();
        c.noise.t1 = None;
        c.methods.push(MethodKind::NaiveH);
        let back = ExperimentConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
        let d = ExperimentConfig::default();
        assert_eq!(ExperimentConfig::from_toml(&d.to_toml()).unwrap(), d);
    }

    #[test]
    fn defaults_follow_the_statistics_protocol() {
        let c = ExperimentConfig::default();
        assert_eq!((c.n_runs, c.n_shots), (20, 4000));
        assert_eq!(c.thetas, vec![PI / 4.0, PI]);
    }

    #[test]
    fn unknown_keys_report_a_line() {
        let err = ExperimentConfig::from_toml("n_min = 2\nbogus = 1\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi/4").unwrap(), PI / 4.0);
        assert_eq!(parse_angle("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_angle("3*pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_angle("PI").unwrap(), PI);
        assert_eq!(parse_angle("0.5").unwrap(), 0.5);
        assert!(parse_angle("pie").is_err());
    }
}
