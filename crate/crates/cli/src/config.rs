//! Experiment configuration for `concentrate`: fully determines a run and
//! round-trips losslessly through its JSON file form.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use ranking_core::generators::GeneratorSpec;
use ranking_core::Engine;

use crate::error::{CliError, Result};

/// Where the instance comes from: an instance file path, or an inline
/// generator spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceSource {
    Path(PathBuf),
    Generator(GeneratorSpec),
}

impl InstanceSource {
    /// Provenance string recorded in the results CSV.
    pub fn id(&self) -> String {
        match self {
            InstanceSource::Path(p) => p.display().to_string(),
            InstanceSource::Generator(spec) => spec.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instance: InstanceSource,
    pub engine: Engine,
    /// Smoothing for eps_ranking. When omitted, the weighted tail
    /// comparison uses eps = alpha / 2 per grid row.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    pub trials: usize,
    pub master_seed: u64,
    pub alpha_grid: Vec<f64>,
    /// Competitive-ratio constant for the fully-online comparison; when
    /// omitted it defaults to 0.567 on bipartite instances and 0.521
    /// otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    pub output: PathBuf,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::io(format!("experiment config: {e}")))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }
}
