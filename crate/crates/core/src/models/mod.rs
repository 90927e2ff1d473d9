//! Scalar-on-function predictors behind one `predict` interface, plus
//! validation-set hyperparameter selection.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::datagen::{apply_transform, TransformKind};
use crate::error::{Error, Result};
use crate::sample::FunctionalSample;

pub mod bspline;
pub mod fknn;
pub mod flm;

pub use bspline::bspline_basis;
pub use fknn::{fit_fknn, FunctionalKnn};
pub use flm::{fit_flm, FunctionalLinearModel};

/// A trained scalar-on-function prediction model.
///
/// `predict` accepts any sample on the training grid and returns one finite
/// value per curve. Implementations are immutable and deterministic.
pub trait Predictor: Send + Sync {
    fn predict(&self, sample: &FunctionalSample) -> Result<Vec<f64>>;
    fn name(&self) -> &'static str;
}

/// Baseline that predicts one fixed value for every curve.
#[derive(Debug, Clone)]
pub struct ConstantMean {
    value: f64,
}

impl ConstantMean {
    pub fn fit(targets: &[f64]) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::InvalidArgument(
                "cannot fit a mean to zero targets".into(),
            ));
        }
        Ok(Self {
            value: targets.iter().sum::<f64>() / targets.len() as f64,
        })
    }

    pub fn new(value: f64) -> Self {
        Self { value }
    }

    pub fn value(&self) -> f64 {
        self.value
    }
}

impl Predictor for ConstantMean {
    fn predict(&self, sample: &FunctionalSample) -> Result<Vec<f64>> {
        Ok(vec![self.value; sample.num_curves()])
    }

    fn name(&self) -> &'static str {
        "constant_mean"
    }
}

/// The true regression function used directly as the predictor: applies a
/// target transformation row-wise with no fitting.
#[derive(Debug, Clone)]
pub struct OraclePredictor {
    transform: TransformKind,
}

impl OraclePredictor {
    pub fn new(transform: TransformKind) -> Self {
        Self { transform }
    }

    pub fn transform(&self) -> TransformKind {
        self.transform
    }
}

impl Predictor for OraclePredictor {
    fn predict(&self, sample: &FunctionalSample) -> Result<Vec<f64>> {
        apply_transform(sample, self.transform)
    }

    fn name(&self) -> &'static str {
        "oracle"
    }
}

/// Coefficient of determination `1 - SSE / SST`.
pub fn r_squared(targets: &[f64], predictions: &[f64]) -> Result<f64> {
    if targets.len() != predictions.len() || targets.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "target/prediction lengths {} vs {}",
            targets.len(),
            predictions.len()
        )));
    }
    let mean = targets.iter().sum::<f64>() / targets.len() as f64;
    let sst: f64 = targets.iter().map(|y| (y - mean) * (y - mean)).sum();
    if sst <= 0.0 {
        return Err(Error::InvalidArgument(
            "R^2 is undefined for constant targets".into(),
        ));
    }
    let sse: f64 = targets
        .iter()
        .zip(predictions)
        .map(|(y, p)| (y - p) * (y - p))
        .sum();
    Ok(1.0 - sse / sst)
}

/// One fitted configuration of a tunable model family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ModelConfig {
    Flm { basis_size: usize, ridge: f64 },
    Fknn { neighbors: usize },
}

/// Candidate configurations for one model family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SearchGrid {
    Flm {
        basis_sizes: Vec<usize>,
        ridges: Vec<f64>,
    },
    Fknn {
        neighbors: Vec<usize>,
    },
}

impl SearchGrid {
    /// Candidates in tie-break order: smaller basis first then larger ridge
    /// for the linear model; fewer neighbours first for k-NN.
    fn candidates(&self) -> Vec<ModelConfig> {
        match self {
            SearchGrid::Flm {
                basis_sizes,
                ridges,
            } => {
                let mut sizes = basis_sizes.clone();
                sizes.sort_unstable();
                let mut lambdas = ridges.clone();
                lambdas.sort_by(|a, b| b.partial_cmp(a).expect("finite ridges"));
                sizes
                    .iter()
                    .flat_map(|&k| {
                        lambdas
                            .iter()
                            .map(move |&l| ModelConfig::Flm {
                                basis_size: k,
                                ridge: l,
                            })
                    })
                    .collect()
            }
            SearchGrid::Fknn { neighbors } => {
                let mut ks = neighbors.clone();
                ks.sort_unstable();
                ks.iter()
                    .map(|&k| ModelConfig::Fknn { neighbors: k })
                    .collect()
            }
        }
    }
}

/// Winner of a validation-set search.
pub struct SelectedModel {
    pub config: ModelConfig,
    pub validation_r2: f64,
    pub predictor: Arc<dyn Predictor>,
}

/// Fit every configuration on the training set, score R^2 on the validation
/// set, and return the maximizer. Ties keep the earliest candidate in
/// tie-break order; configurations that fail to fit are skipped.
pub fn select_hyperparameters(
    grid: &SearchGrid,
    train: &FunctionalSample,
    train_targets: &[f64],
    validation: &FunctionalSample,
    validation_targets: &[f64],
) -> Result<SelectedModel> {
    let candidates = grid.candidates();
    if candidates.is_empty() {
        return Err(Error::Selection("the search grid is empty".into()));
    }
    let mut best: Option<SelectedModel> = None;
    let mut last_error = None;
    for config in candidates {
        let fitted: Result<Arc<dyn Predictor>> = match config {
            ModelConfig::Flm { basis_size, ridge } => {
                fit_flm(train, train_targets, basis_size, ridge)
                    .map(|m| Arc::new(m) as Arc<dyn Predictor>)
            }
            ModelConfig::Fknn { neighbors } => fit_fknn(train, train_targets, neighbors)
                .map(|m| Arc::new(m) as Arc<dyn Predictor>),
        };
        let predictor = match fitted {
            Ok(p) => p,
            Err(e) => {
                last_error = Some(e);
                continue;
            }
        };
        let score = r_squared(validation_targets, &predictor.predict(validation)?)?;
        let better = best
            .as_ref()
            .is_none_or(|b| score > b.validation_r2);
        if better {
            best = Some(SelectedModel {
                config,
                validation_r2: score,
                predictor,
            });
        }
    }
    best.ok_or_else(|| {
        Error::Selection(format!(
            "every configuration failed to fit; last error: {}",
            last_error.map_or_else(|| "none".into(), |e| e.to_string())
        ))
    })
}
