//! Campaign configuration file (TOML): seeds, tools, batches, and run
//! settings in one reproducibility artifact.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Duration;

use mugie::genloop::BatchSpec;
use mugie::harness::ToolSpec;
use mugie::mutops::{OperatorKind, ALL_OPERATORS};
use regex::Regex;
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub campaign: CampaignSection,
    #[serde(default)]
    pub seeds: Vec<SeedEntry>,
    #[serde(default)]
    pub tools: Vec<ToolEntry>,
    /// Batch definitions; when absent, the standard twelve batches run
    /// (the all-operator batch plus one per operator).
    #[serde(default)]
    pub batches: Vec<BatchEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignSection {
    pub out_dir: PathBuf,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_rng_seed")]
    pub rng_seed: u64,
}

fn default_workers() -> usize {
    1
}

fn default_rng_seed() -> u64 {
    42
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedEntry {
    pub path: PathBuf,
    pub group: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToolEntry {
    pub name: String,
    pub command: String,
    #[serde(default = "default_timeout_seconds")]
    pub timeout_seconds: f64,
    #[serde(default = "default_confirm_runs")]
    pub confirm_runs: u32,
    pub success_pattern: Option<String>,
    pub failure_pattern: Option<String>,
}

fn default_timeout_seconds() -> f64 {
    20.0
}

fn default_confirm_runs() -> u32 {
    10
}

impl ToolEntry {
    pub fn to_tool_spec(&self) -> Result<ToolSpec, String> {
        let mut spec = ToolSpec::new(&self.name, &self.command).map_err(|e| e.to_string())?;
        if !self.timeout_seconds.is_finite() || self.timeout_seconds <= 0.0 {
            return Err(format!("tool `{}`: timeout_seconds must be positive", self.name));
        }
        spec = spec
            .with_timeout(Duration::from_secs_f64(self.timeout_seconds))
            .with_confirm_runs(self.confirm_runs);
        let success = match &self.success_pattern {
            Some(p) => Regex::new(p).map_err(|e| format!("tool `{}`: bad success pattern: {e}", self.name))?,
            None => spec.success_pattern.clone(),
        };
        let failure = match &self.failure_pattern {
            Some(p) => Regex::new(p).map_err(|e| format!("tool `{}`: bad failure pattern: {e}", self.name))?,
            None => spec.failure_pattern.clone(),
        };
        Ok(spec.with_patterns(success, failure))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchEntry {
    pub name: String,
    /// Single-operator batch shorthand; exclusive with `weights`.
    pub only: Option<String>,
    pub weights: Option<BTreeMap<String, f64>>,
    pub num_mutants: Option<usize>,
    pub max_attempts: Option<u64>,
    #[serde(default)]
    pub allow_trigger_mutation: bool,
}

impl BatchEntry {
    /// Resolves to a batch spec; the rng seed is derived per seed file later.
    pub fn to_batch_spec(&self) -> Result<BatchSpec, String> {
        let mut spec = match (&self.only, &self.weights) {
            (Some(_), Some(_)) => {
                return Err(format!("batch `{}`: `only` and `weights` are exclusive", self.name))
            }
            (Some(op), None) => {
                let kind: OperatorKind = op.parse()?;
                let mut s = BatchSpec::single_operator(kind, 0);
                // An explicit G2 batch opts into trigger mutation already;
                // the flag may also be set for clarity.
                s.allow_trigger_mutation |= self.allow_trigger_mutation;
                s
            }
            (None, Some(weights)) => {
                let mut s = BatchSpec::all_operators(0);
                s.weights.clear();
                for kind in ALL_OPERATORS {
                    s.weights.insert(kind, 0.0);
                }
                for (name, weight) in weights {
                    let kind: OperatorKind = name.parse()?;
                    s.weights.insert(kind, *weight);
                }
                s.num_mutants = 100;
                s.max_attempts = BatchSpec::default_max_attempts(100);
                s.allow_trigger_mutation = self.allow_trigger_mutation;
                s
            }
            (None, None) => {
                let mut s = BatchSpec::all_operators(0);
                s.allow_trigger_mutation = self.allow_trigger_mutation;
                s
            }
        };
        if let Some(n) = self.num_mutants {
            spec = spec.with_num_mutants(n);
        }
        if let Some(m) = self.max_attempts {
            spec = spec.with_max_attempts(m);
        }
        spec.validate().map_err(|e| format!("batch `{}`: {e}", self.name))?;
        Ok(spec)
    }
}

/// The standard experimental design: one batch with every semantics-safe
/// operator at equal weight and 100 mutants, then one 50-mutant batch per
/// operator (G2 flagged as trigger-mutating).
pub fn default_batches() -> Vec<(String, BatchSpec)> {
    let mut batches = vec![("Mstar".to_string(), BatchSpec::all_operators(0))];
    for kind in ALL_OPERATORS {
        batches.push((kind.to_string(), BatchSpec::single_operator(kind, 0)));
    }
    batches
}

pub fn parse_config(text: &str) -> Result<CampaignConfig, String> {
    toml::from_str(text).map_err(|e| e.to_string())
}
