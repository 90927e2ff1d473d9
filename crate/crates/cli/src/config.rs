//! Run configuration: one JSON document fully determines a run.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use funshap::datagen::ScenarioSpec;
use serde::{Deserialize, Serialize};

/// Top-level configuration for `run`, `generate`, and `relevance`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Synthetic-data scenario; exactly one of `scenario`/`external` is set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioSpec>,
    /// Externally supplied train/validation/test CSV files.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub external: Option<ExternalData>,
    /// Number of partition intervals (players).
    #[serde(default = "default_intervals")]
    pub intervals: usize,
    /// Number of sampled permutations per replica.
    #[serde(default = "default_permutations")]
    pub permutations: usize,
    /// Every downstream seed derives from this one.
    pub master_seed: u64,
    #[serde(default = "default_replicas")]
    pub replicas: usize,
    pub predictors: Vec<PredictorSpec>,
    pub output_dir: PathBuf,
    /// Emit one SVG relevance plot per predictor.
    #[serde(default = "default_true")]
    pub plot: bool,
}

fn default_intervals() -> usize {
    20
}

fn default_permutations() -> usize {
    1000
}

fn default_replicas() -> usize {
    1
}

fn default_true() -> bool {
    true
}

/// One predictor family with its hyperparameter grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum PredictorSpec {
    Flm {
        #[serde(default = "default_basis_sizes")]
        basis_sizes: Vec<usize>,
        #[serde(default = "default_ridges")]
        ridges: Vec<f64>,
    },
    Fknn {
        #[serde(default = "default_neighbors")]
        neighbors: Vec<usize>,
    },
    /// The data-generating transformation used as the predictor (scenario runs only).
    Oracle,
    /// Predicts the training-target mean for every curve.
    ConstantMean,
}

fn default_basis_sizes() -> Vec<usize> {
    vec![8, 12, 16, 20]
}

fn default_ridges() -> Vec<f64> {
    vec![1e-8, 1e-4, 1e-2]
}

fn default_neighbors() -> Vec<usize> {
    vec![1, 3, 5, 9, 15]
}

impl PredictorSpec {
    pub fn family_name(&self) -> &'static str {
        match self {
            PredictorSpec::Flm { .. } => "flm",
            PredictorSpec::Fknn { .. } => "fknn",
            PredictorSpec::Oracle => "oracle",
            PredictorSpec::ConstantMean => "constant_mean",
        }
    }
}

/// Paths of externally supplied data; the three curve files must share one grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternalData {
    pub train_curves: PathBuf,
    pub train_targets: PathBuf,
    pub validation_curves: PathBuf,
    pub validation_targets: PathBuf,
    pub test_curves: PathBuf,
    pub test_targets: PathBuf,
    /// Replace curves by their second derivatives before any fitting.
    #[serde(default)]
    pub second_derivative: bool,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let config: RunConfig = serde_json::from_str(&text)
            .with_context(|| format!("cannot parse config {}", path.display()))?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.scenario, &self.external) {
            (None, None) => bail!("config needs either a scenario or external data paths"),
            (Some(_), Some(_)) => {
                bail!("config sets both scenario and external data; pick one")
            }
            _ => {}
        }
        if let Some(s) = &self.scenario {
            s.validate()
                .map_err(|e| anyhow::anyhow!("invalid scenario: {e}"))?;
        }
        if self.intervals == 0 {
            bail!("intervals must be at least 1");
        }
        if self.permutations == 0 {
            bail!("permutations must be at least 1");
        }
        if self.replicas == 0 {
            bail!("replicas must be at least 1");
        }
        if self.predictors.is_empty() {
            bail!("configure at least one predictor");
        }
        for p in &self.predictors {
            match p {
                PredictorSpec::Flm {
                    basis_sizes,
                    ridges,
                } => {
                    if basis_sizes.is_empty() || ridges.is_empty() {
                        bail!("the linear-model search grid is empty");
                    }
                }
                PredictorSpec::Fknn { neighbors } => {
                    if neighbors.is_empty() {
                        bail!("the k-NN search grid is empty");
                    }
                }
                PredictorSpec::Oracle => {
                    if self.scenario.is_none() {
                        bail!("the oracle predictor needs a scenario (it applies the scenario's transformation)");
                    }
                }
                PredictorSpec::ConstantMean => {}
            }
        }
        Ok(())
    }
}

/// Roles a derived seed can play within one replica.
#[derive(Debug, Clone, Copy)]
pub enum SeedRole {
    TrainCurves = 0,
    TrainNoise = 1,
    ValidationCurves = 2,
    ValidationNoise = 3,
    TestCurves = 4,
    TestNoise = 5,
    Permutations = 6,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Deterministic seed for `(master, replica, role)`; distinct inputs cannot
/// collide before mixing because the mixer is a bijection.
pub fn derive_seed(master_seed: u64, replica: usize, role: SeedRole) -> u64 {
    let index = (replica as u64).wrapping_mul(16).wrapping_add(role as u64);
    splitmix64(splitmix64(master_seed).wrapping_add(index))
}
