//! Versioned TOML experiment configuration.
//!
//! ```toml
//! schema_version = 1
//! model = "vilar_oscillator"      # or model_file = "my_model.toml"
//! seed = 2018
//! repetitions = 5
//! pool_sizes = [10, 50, 200]
//! methods = ["mab_eps_first", "static_single", "static_l2_topk", "static_random_k"]
//! calibration_size = 50
//! output_dir = "runs/desk"
//!
//! [observed]
//! n_trajectories = 30
//! n_grid_points = 200
//! t_end = 100.0
//! # theta = [...]               # defaults to the model's reference values
//!
//! [defaults]
//! epsilon = 0.5
//! n_accept = 20
//! tau = 0.05
//! max_simulations = 3000
//! k = 3
//!
//! [overrides.static_random_k]
//! max_simulations = 1000
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use statbandit::abc::Prior;

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable that relocates relative output directories.
pub const OUTPUT_ROOT_ENV: &str = "STATBANDIT_OUTPUT_ROOT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    MabEpsFirst,
    MabEpsGreedy,
    StaticSingle,
    StaticL2Topk,
    StaticRandomK,
    UniformRandom,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::MabEpsFirst => "mab_eps_first",
            Method::MabEpsGreedy => "mab_eps_greedy",
            Method::StaticSingle => "static_single",
            Method::StaticL2Topk => "static_l2_topk",
            Method::StaticRandomK => "static_random_k",
            Method::UniformRandom => "uniform_random",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservedSpec {
    pub n_trajectories: usize,
    pub n_grid_points: usize,
    pub t_end: f64,
    #[serde(default)]
    pub theta: Option<Vec<f64>>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSettings {
    pub epsilon: f64,
    pub n_accept: usize,
    pub tau: f64,
    pub max_simulations: usize,
    /// Statistic count for the top-k and random-k baselines.
    pub k: usize,
    pub record_all: bool,
}

impl Default for MethodSettings {
    fn default() -> Self {
        Self {
            epsilon: 0.5,
            n_accept: 100,
            tau: 0.05,
            max_simulations: 300,
            k: 3,
            record_all: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingsOverride {
    pub epsilon: Option<f64>,
    pub n_accept: Option<usize>,
    pub tau: Option<f64>,
    pub max_simulations: Option<usize>,
    pub k: Option<usize>,
    pub record_all: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub model: Option<String>,
    #[serde(default)]
    pub model_file: Option<PathBuf>,
    #[serde(default)]
    pub observable: Option<String>,
    pub seed: u64,
    #[serde(default = "one")]
    pub repetitions: usize,
    pub pool_sizes: Vec<usize>,
    pub methods: Vec<Method>,
    #[serde(default = "default_calibration")]
    pub calibration_size: usize,
    pub output_dir: PathBuf,
    /// Pool statistic ids to use instead of random catalog draws.
    #[serde(default)]
    pub pool: Option<Vec<String>>,
    #[serde(default)]
    pub prior: Option<Prior>,
    pub observed: ObservedSpec,
    #[serde(default)]
    pub defaults: MethodSettings,
    #[serde(default)]
    pub overrides: BTreeMap<Method, SettingsOverride>,
    /// Directory relative paths in the config are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn one() -> usize {
    1
}

fn default_calibration() -> usize {
    50
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).context("parsing experiment config")?;
        if cfg.schema_version != SCHEMA_VERSION {
            bail!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                cfg.schema_version
            );
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg = Self::from_toml(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn settings_for(&self, method: Method) -> MethodSettings {
        let mut s = self.defaults.clone();
        if let Some(o) = self.overrides.get(&method) {
            if let Some(v) = o.epsilon {
                s.epsilon = v;
            }
            if let Some(v) = o.n_accept {
                s.n_accept = v;
            }
            if let Some(v) = o.tau {
                s.tau = v;
            }
            if let Some(v) = o.max_simulations {
                s.max_simulations = v;
            }
            if let Some(v) = o.k {
                s.k = v;
            }
            if let Some(v) = o.record_all {
                s.record_all = v;
            }
        }
        s
    }

    /// Output directory after applying [`OUTPUT_ROOT_ENV`].
    pub fn output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_ROOT_ENV) {
            Some(root) if self.output_dir.is_relative() => {
                PathBuf::from(root).join(&self.output_dir)
            }
            _ => self.output_dir.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            bail!("repetitions must be at least 1");
        }
        if self.model.is_some() == self.model_file.is_some() {
            bail!("exactly one of `model` and `model_file` must be set");
        }
        if self.pool_sizes.is_empty() || self.methods.is_empty() {
            bail!("pool_sizes and methods must be non-empty");
        }
        if self.pool.is_some() && self.pool_sizes.len() != 1 {
            bail!("an explicit pool requires exactly one pool size");
        }
        if self.observed.n_trajectories == 0 || self.observed.n_grid_points == 0 {
            bail!("observed data needs at least one trajectory and grid point");
        }
        if self.calibration_size == 0 {
            bail!("calibration_size must be at least 1");
        }
        for &m in &self.methods {
            let s = self.settings_for(m);
            if !(0.0..=1.0).contains(&s.epsilon) {
                bail!("{m}: epsilon must lie in [0, 1]");
            }
            if !(s.tau > 0.0 && s.tau <= 1.0) {
                bail!("{m}: tau must lie in (0, 1]");
            }
            if s.n_accept == 0 || s.max_simulations == 0 {
                bail!("{m}: n_accept and max_simulations must be positive");
            }
            if matches!(m, Method::StaticL2Topk | Method::StaticRandomK) && s.k == 0 {
                bail!("{m}: k must be positive");
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
schema_version = 1
model = "birth_death"
seed = 1
pool_sizes = [10]
methods = ["mab_eps_first", "static_random_k"]
output_dir = "out"

[prior]
type = "uniform"
lower = [1.0, 0.5]
upper = [20.0, 2.0]

[observed]
n_trajectories = 2
n_grid_points = 20
t_end = 10.0
theta = [10.0, 1.0]

[defaults]
epsilon = 0.5
n_accept = 5
tau = 0.1
max_simulations = 100
k = 3
record_all = true

[overrides.static_random_k]
max_simulations = 40
"#;

    #[test]
    fn parses_and_applies_overrides() {
        let cfg = ExperimentConfig::from_toml(MINIMAL).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.repetitions, 1);
        assert_eq!(cfg.calibration_size, 50);
        assert_eq!(cfg.settings_for(Method::MabEpsFirst).max_simulations, 100);
        assert_eq!(cfg.settings_for(Method::StaticRandomK).max_simulations, 40);
        assert!(matches!(cfg.prior, Some(Prior::Uniform { .. })));
    }

    #[test]
    fn rejects_wrong_schema_version() {
        let text = MINIMAL.replace("schema_version = 1", "schema_version = 2");
        assert!(ExperimentConfig::from_toml(&text).is_err());
    }

    #[test]
    fn rejects_unknown_method() {
        let text = MINIMAL.replace("\"static_random_k\"]", "\"abc_smc\"]");
        assert!(ExperimentConfig::from_toml(&text).is_err());
    }

    #[test]
    fn validation_catches_bad_settings() {
        let mut cfg = ExperimentConfig::from_toml(MINIMAL).unwrap();
        cfg.repetitions = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::from_toml(MINIMAL).unwrap();
        cfg.defaults.tau = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::from_toml(MINIMAL).unwrap();
        cfg.model_file = Some("x.toml".into());
        assert!(cfg.validate().is_err());
    }
}
