//! Experiment configuration as echoed into every run record.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use smoothboost::weaklearn::memorize::TieRule;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Spectral,
    JuntaMaj,
    DictatorIdentity,
    VarianceSandwich,
    Rounding,
    SoftSandwich,
    Concentration,
    Covering,
    WeakLearnUniform,
    WeakLearnAdversarial,
    MemorizeBaseline,
    UniformConvergence,
}

impl Experiment {
    pub const ALL: [Experiment; 12] = [
        Experiment::Spectral,
        Experiment::JuntaMaj,
        Experiment::DictatorIdentity,
        Experiment::VarianceSandwich,
        Experiment::Rounding,
        Experiment::SoftSandwich,
        Experiment::Concentration,
        Experiment::Covering,
        Experiment::WeakLearnUniform,
        Experiment::WeakLearnAdversarial,
        Experiment::MemorizeBaseline,
        Experiment::UniformConvergence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Spectral => "spectral",
            Experiment::JuntaMaj => "junta-maj",
            Experiment::DictatorIdentity => "dictator-identity",
            Experiment::VarianceSandwich => "variance-sandwich",
            Experiment::Rounding => "rounding",
            Experiment::SoftSandwich => "soft-sandwich",
            Experiment::Concentration => "concentration",
            Experiment::Covering => "covering",
            Experiment::WeakLearnUniform => "weak-learn-uniform",
            Experiment::WeakLearnAdversarial => "weak-learn-adversarial",
            Experiment::MemorizeBaseline => "memorize-baseline",
            Experiment::UniformConvergence => "uniform-convergence",
        }
    }

    /// Acceptance criterion checked by this experiment.
    pub fn criterion(self) -> u32 {
        match self {
            Experiment::Spectral => 1,
            Experiment::JuntaMaj => 2,
            Experiment::DictatorIdentity => 3,
            Experiment::VarianceSandwich => 4,
            Experiment::Rounding => 5,
            Experiment::SoftSandwich => 6,
            Experiment::Concentration => 7,
            Experiment::Covering => 8,
            Experiment::WeakLearnUniform => 9,
            Experiment::WeakLearnAdversarial => 10,
            Experiment::MemorizeBaseline => 11,
            Experiment::UniformConvergence => 12,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Tie rule of the memorizing baseline on unseen points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TieRuleArg {
    Plus,
    Minus,
    Random,
}

impl From<TieRuleArg> for TieRule {
    fn from(t: TieRuleArg) -> Self {
        match t {
            TieRuleArg::Plus => TieRule::Fixed(1),
            TieRuleArg::Minus => TieRule::Fixed(-1),
            TieRuleArg::Random => TieRule::Randomized,
        }
    }
}

/// One experiment run. Unset parameters take the experiment's defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_override: Option<u32>,
    #[serde(default)]
    pub fix_inner: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tie_rule: Option<TieRuleArg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment, seed: u64) -> Self {
        ExperimentConfig {
            experiment,
            seed,
            k: None,
            n: None,
            m: None,
            kappa: None,
            trials: None,
            delta: None,
            epsilon: None,
            grid: None,
            u_override: None,
            fix_inner: false,
            tie_rule: None,
            out: None,
            format: Format::Csv,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}
