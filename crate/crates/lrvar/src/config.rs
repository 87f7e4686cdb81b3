//! Study configuration files.
//!
//! TOML is the primary format; a file ending in `.json` is read as JSON with
//! the same structure. A run manifest is itself a valid JSON config.
//!
//! ```toml
//! [[experiment]]
//! name = "part1"
//! target = "sigma_sq"          # or "sigma_f_sq"
//! n = 500
//! replications = 1000
//! master_seed = 1
//! # specs = [{ ar = 0.5, ma = 0.0 }]   (default: the eleven reference settings)
//!
//! [[experiment.estimators]]
//! name = "carlstein"
//! params = [1, 2, 5, "adaptive"]
//! ```

use std::fmt;
use std::path::Path;

use lrvar_core::sim::{ArmaSpec, DEFAULT_BURN_IN, TABLE_1};
use lrvar_core::study::{CellSpec, EstimatorId, Smoothing};
use serde::{Deserialize, Serialize};

/// The reference design: Part 1 (σ²) and Part 2 (σ_F², split-half).
pub const DEFAULT_CONFIG: &str = include_str!("../configs/reference.toml");

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed TOML: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("experiment {experiment:?}: {message}")]
    Invalid { experiment: String, message: String },
    #[error("config contains no experiments")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    SigmaSq,
    SigmaFSq,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecEntry {
    pub ar: f64,
    pub ma: f64,
    #[serde(default = "one")]
    pub innovation_sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Number(f64),
    Keyword(String),
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Number(v) => write!(f, "{v}"),
            ParamValue::Keyword(k) => f.write_str(k),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridEntry {
    pub name: String,
    pub params: Vec<ParamValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub target: Target,
    #[serde(default = "default_specs")]
    pub specs: Vec<SpecEntry>,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    #[serde(default)]
    pub split_half: bool,
    #[serde(default)]
    pub master_seed: u64,
    /// Square σ-estimators before comparing them with a variance.
    #[serde(default = "yes")]
    pub square_sigma_estimators: bool,
    pub estimators: Vec<GridEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    #[serde(rename = "experiment")]
    pub experiments: Vec<ExperimentConfig>,
}

fn one() -> f64 {
    1.0
}
fn yes() -> bool {
    true
}
fn default_n() -> usize {
    500
}
fn default_replications() -> usize {
    1000
}
fn default_burn_in() -> usize {
    DEFAULT_BURN_IN
}
fn default_specs() -> Vec<SpecEntry> {
    TABLE_1
        .iter()
        .map(|&(ar, ma)| SpecEntry {
            ar,
            ma,
            innovation_sd: 1.0,
        })
        .collect()
}

impl StudyConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.display().to_string(),
            source,
        })?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json(&text),
            _ => Self::from_toml(&text),
        }
    }

    pub fn reference() -> Self {
        Self::from_toml(DEFAULT_CONFIG).expect("bundled config parses")
    }

    pub fn resolve(&self) -> Result<Vec<Experiment>, ConfigError> {
        if self.experiments.is_empty() {
            return Err(ConfigError::Empty);
        }
        self.experiments
            .iter()
            .map(ExperimentConfig::resolve)
            .collect()
    }
}

/// A validated experiment, ready to run.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub name: String,
    pub specs: Vec<ArmaSpec>,
    pub n: usize,
    pub replications: usize,
    pub burn_in: usize,
    pub target: Target,
    pub split_half: bool,
    pub master_seed: u64,
    pub square_sigma_estimators: bool,
    pub grid: Vec<CellSpec>,
}

impl Experiment {
    /// Length of the series each estimate is computed from.
    pub fn effective_n(&self) -> usize {
        if self.split_half {
            self.n / 2
        } else {
            self.n
        }
    }
}

impl ExperimentConfig {
    pub fn resolve(&self) -> Result<Experiment, ConfigError> {
        let invalid = |message: String| ConfigError::Invalid {
            experiment: self.name.clone(),
            message,
        };
        if self.n == 0 {
            return Err(invalid("n must be at least 1".into()));
        }
        if self.replications == 0 {
            return Err(invalid("replications must be at least 1".into()));
        }
        if self.split_half && self.n % 2 != 0 {
            return Err(invalid(format!(
                "split_half needs an even n, got {}",
                self.n
            )));
        }
        if self.specs.is_empty() {
            return Err(invalid("no specs".into()));
        }
        let specs = self
            .specs
            .iter()
            .map(|s| ArmaSpec::new(s.ar, s.ma, s.innovation_sd))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| invalid(e.to_string()))?;

        let effective_n = if self.split_half { self.n / 2 } else { self.n };
        let mut grid = Vec::new();
        for entry in &self.estimators {
            let estimator: EstimatorId = entry.name.parse().map_err(|e| invalid(format!("{e}")))?;
            if entry.params.is_empty() {
                return Err(invalid(format!("{} has no parameters", entry.name)));
            }
            for p in &entry.params {
                let smoothing = parse_param(estimator, p).map_err(invalid)?;
                if let Smoothing::BlockLength(l) = smoothing {
                    if l > effective_n {
                        return Err(invalid(format!(
                            "{estimator} block length {l} exceeds the sample length {effective_n}"
                        )));
                    }
                }
                let square = self.square_sigma_estimators && estimator.estimates_scale();
                grid.push(
                    CellSpec::new(estimator, smoothing)
                        .split_half(self.split_half)
                        .square(square),
                );
            }
        }
        if grid.is_empty() {
            return Err(invalid("no estimators".into()));
        }
        Ok(Experiment {
            name: self.name.clone(),
            specs,
            n: self.n,
            replications: self.replications,
            burn_in: self.burn_in,
            target: self.target,
            split_half: self.split_half,
            master_seed: self.master_seed,
            square_sigma_estimators: self.square_sigma_estimators,
            grid,
        })
    }
}

fn parse_param(estimator: EstimatorId, p: &ParamValue) -> Result<Smoothing, String> {
    match p {
        ParamValue::Keyword(k) if k == "adaptive" => {
            if estimator.uses_bandwidth() {
                Err(format!("{estimator} has no adaptive bandwidth"))
            } else {
                Ok(Smoothing::Adaptive)
            }
        }
        ParamValue::Keyword(k) => k
            .parse::<f64>()
            .map_err(|_| format!("{estimator}: unknown parameter {k:?}"))
            .and_then(|v| parse_param(estimator, &ParamValue::Number(v))),
        ParamValue::Number(v) => estimator
            .smoothing_from_value(*v)
            .map_err(|e| format!("{estimator}: {e}")),
    }
}

/// Parses a command-line smoothing parameter (`adaptive` or a number).
pub fn parse_smoothing(estimator: EstimatorId, text: &str) -> Result<Smoothing, String> {
    parse_param(estimator, &ParamValue::Keyword(text.trim().to_string()))
}
