//! Versioned acceptance thresholds.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Environment variable naming an alternative constants file.
pub const CONSTANTS_ENV: &str = "SMOOTHBOOST_CONSTANTS";

const EMBEDDED: &str = include_str!("../constants.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    pub version: u32,
    pub pilot_seed: u64,
    pub acceptance_seed: u64,
    #[serde(default)]
    pub unattainable: Vec<u32>,
    pub thresholds: Thresholds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    pub spectral_tolerance: f64,
    pub dictator_identity_tolerance: f64,
    pub dictator_constant: f64,
    pub variance_tolerance: f64,
    pub concentration_sigmas: f64,
    pub concentration_tail: f64,
    pub covering_mean_tolerance: f64,
    pub weak_uniform_positive_runs: u64,
    pub weak_uniform_mean_advantage: f64,
    pub weak_uniform_g_correlation_mean: f64,
    pub weak_uniform_tail_runs: u64,
    pub weak_adversarial_runs: u64,
    pub adversarial_max_kappa: f64,
    pub memorize_tolerance: f64,
    pub memorize_sigmas: f64,
    pub uniform_convergence_fraction: f64,
}

impl Constants {
    pub fn embedded() -> Self {
        Self::parse(EMBEDDED).expect("embedded constants file is valid")
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("constants: {e}")))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// The file named by [`CONSTANTS_ENV`] if set, otherwise the embedded defaults.
    pub fn load() -> Result<Self> {
        match std::env::var_os(CONSTANTS_ENV) {
            Some(path) => Self::from_path(Path::new(&path)),
            None => Ok(Self::embedded()),
        }
    }

    /// Scales trial-count thresholds stated per 100 runs down to `trials`.
    pub fn runs_needed(per_hundred: u64, trials: u64) -> u64 {
        (per_hundred * trials).div_ceil(100)
    }
}
