//! Experiment configuration, stored as TOML:
//!
//! ```toml
//! spec_version = 1
//! family = "gaussian"          # gaussian | exponential | gamma
//! times = [1.0, 2.0, 3.0, 4.0]
//! output_path = "out/fig1"
//!
//! [parameters]                 # alpha, mu1, mu2, mu3, mu4 as the family needs
//! alpha = 1.0
//! mu1 = 0.5
//! mu2 = 1.0
//! mu4 = 1.0
//!
//! [grid]
//! x_min = -12.0
//! x_max = 24.0
//! n = 2000
//!
//! [oracle]                     # optional; needed by `validate`
//! enabled = true
//! n_steps = 3000               # Crank-Nicolson steps from times[0] to the last time
//! n_paths = 100000             # 0 skips the Monte-Carlo check
//! dt = 0.0015
//! seed = 2024
//! ```
//!
//! Unknown keys are rejected. `FPE_SEED` overrides `oracle.seed`.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::oracle::MIN_GRID_POINTS;
use crate::solutions::{Family, SimilaritySolution};

pub const SPEC_VERSION: u32 = 1;
pub const SEED_ENV: &str = "FPE_SEED";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub spec_version: u32,
    pub family: Family,
    pub times: Vec<f64>,
    pub output_path: PathBuf,
    pub parameters: Parameters,
    pub grid: GridSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu1: Option<f64>,
    pub mu2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu3: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu4: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    pub enabled: bool,
    pub n_steps: usize,
    #[serde(default)]
    pub n_paths: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default)]
    pub seed: u64,
}

/// A configuration problem, tagged with the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.field, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parses and validates; relative output paths are kept as written.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        // check the version first so old files get a clear message
        let raw: toml::Table = toml::from_str(text).map_err(|e| ConfigError::new("", e.to_string()))?;
        match raw.get("spec_version") {
            None => return Err(ConfigError::new("spec_version", "missing; this tool reads spec_version = 1")),
            Some(toml::Value::Integer(v)) if *v == SPEC_VERSION as i64 => {}
            Some(v) => {
                return Err(ConfigError::new(
                    "spec_version",
                    format!("unsupported value {v}; this tool reads spec_version = 1"),
                ))
            }
        }
        let cfg: Self = toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            ConfigError::new("", msg)
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.times.is_empty() {
            return Err(ConfigError::new("times", "at least one time is required"));
        }
        for (i, &t) in self.times.iter().enumerate() {
            if !(t.is_finite() && t > 0.0) {
                return Err(ConfigError::new(format!("times[{i}]"), format!("must be > 0, got {t}")));
            }
            if i > 0 && t <= self.times[i - 1] {
                return Err(ConfigError::new(format!("times[{i}]"), "times must be strictly increasing"));
            }
        }
        let g = &self.grid;
        if !(g.x_min.is_finite() && g.x_max.is_finite() && g.x_max > g.x_min) {
            return Err(ConfigError::new("grid", "x_min and x_max must be finite with x_max > x_min"));
        }
        if g.n < MIN_GRID_POINTS {
            return Err(ConfigError::new("grid.n", format!("must be >= {MIN_GRID_POINTS}, got {}", g.n)));
        }
        if let Some(o) = &self.oracle {
            if o.enabled && o.n_steps == 0 {
                return Err(ConfigError::new("oracle.n_steps", "must be >= 1"));
            }
            if let Some(dt) = o.dt {
                if !(dt.is_finite() && dt > 0.0) {
                    return Err(ConfigError::new("oracle.dt", format!("must be > 0, got {dt}")));
                }
            }
            if o.n_paths > 0 && o.dt.is_none() {
                return Err(ConfigError::new("oracle.dt", "required when n_paths > 0"));
            }
        }
        self.solution().map(|_| ())
    }

    pub fn solution(&self) -> Result<SimilaritySolution, ConfigError> {
        let p = &self.parameters;
        let missing = |name: &str| {
            ConfigError::new(
                format!("parameters.{name}"),
                format!("required by the {} family", self.family),
            )
        };
        match self.family {
            Family::Gaussian => {
                p.mu1.ok_or_else(|| missing("mu1"))?;
                p.mu4.ok_or_else(|| missing("mu4"))?;
            }
            Family::Exponential => {
                p.mu4.ok_or_else(|| missing("mu4"))?;
            }
            Family::Gamma => {
                p.mu1.ok_or_else(|| missing("mu1"))?;
                p.mu3.ok_or_else(|| missing("mu3"))?;
            }
        }
        SimilaritySolution::from_parameters(self.family, p.alpha, p.mu1, p.mu2, p.mu3, p.mu4)
            .map_err(|e| ConfigError::new("parameters", e.to_string()))
    }

    /// Applies `FPE_SEED` when it is set.
    pub fn apply_env_overrides(&mut self) -> Result<(), ConfigError> {
        match std::env::var(SEED_ENV) {
            Ok(v) => self.override_seed(&v),
            Err(_) => Ok(()),
        }
    }

    pub fn override_seed(&mut self, value: &str) -> Result<(), ConfigError> {
        let seed: u64 = value
            .trim()
            .parse()
            .map_err(|_| ConfigError::new(SEED_ENV, format!("not an unsigned integer: {value:?}")))?;
        if let Some(o) = self.oracle.as_mut() {
            o.seed = seed;
        }
        Ok(())
    }
}
