//! Replica orchestration: generate or ingest data, tune and fit predictors,
//! run the Shapley relevance pipeline, and assemble the run report.

use std::sync::Arc;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use funshap::datagen::ScenarioSpec;
use funshap::models::{
    select_hyperparameters, ConstantMean, ModelConfig, OraclePredictor, Predictor, SearchGrid,
};
use funshap::payoff::{PayoffCache, PayoffContext};
use funshap::{
    sample_permutations, shapley_monte_carlo, Coalition, FunctionalSample, GaussianMoments,
    Partition, RelevanceFunction,
};
use serde::{Deserialize, Serialize};

use crate::config::{derive_seed, PredictorSpec, RunConfig, SeedRole};
use crate::ingest::{ingest_external, DataTriplet};

/// Coalition caches stay unbounded up to this many players; beyond it the
/// entry count is capped (reject-new policy).
const UNBOUNDED_CACHE_PLAYER_LIMIT: usize = 20;
const CACHE_ENTRY_CAP: usize = 1 << 20;

/// Seeds derived for one replica.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReplicaSeeds {
    pub train_curves: u64,
    pub train_noise: u64,
    pub validation_curves: u64,
    pub validation_noise: u64,
    pub test_curves: u64,
    pub test_noise: u64,
    pub permutations: u64,
}

pub fn replica_seeds(master: u64, replica: usize) -> ReplicaSeeds {
    ReplicaSeeds {
        train_curves: derive_seed(master, replica, SeedRole::TrainCurves),
        train_noise: derive_seed(master, replica, SeedRole::TrainNoise),
        validation_curves: derive_seed(master, replica, SeedRole::ValidationCurves),
        validation_noise: derive_seed(master, replica, SeedRole::ValidationNoise),
        test_curves: derive_seed(master, replica, SeedRole::TestCurves),
        test_noise: derive_seed(master, replica, SeedRole::TestNoise),
        permutations: derive_seed(master, replica, SeedRole::Permutations),
    }
}

/// Cache statistics for one predictor run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CacheStats {
    pub requests: u64,
    pub hits: u64,
    pub misses: u64,
    pub entries: usize,
}

/// Results of one predictor within one replica.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredictorRun {
    pub name: String,
    /// Winning configuration for tunable families, absent otherwise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selected_config: Option<ModelConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation_r2: Option<f64>,
    /// Payoff of the full coalition: the test-set R^2 of the untouched sample.
    pub r2_full: f64,
    /// Payoff assigned to the empty coalition by the game (always 0).
    pub nu_empty: f64,
    /// R^2 of predictions from fully mean-imputed curves, reported for
    /// transparency; the game does not use it.
    pub rtilde2_empty: f64,
    pub phi: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub cache: CacheStats,
    pub wall_clock_seconds: f64,
}

/// Results of one replica.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReplicaOutcome {
    pub replica: usize,
    pub seeds: ReplicaSeeds,
    pub predictors: Vec<PredictorRun>,
}

/// A replica that was skipped after a fit failure.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FailedReplica {
    pub replica: usize,
    pub error: String,
}

/// Replica-mean summary per predictor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredictorMean {
    pub name: String,
    pub replicas_used: usize,
    pub r2_full: f64,
    pub nu_empty: f64,
    pub rtilde2_empty: f64,
    pub phi: Vec<f64>,
    pub std_errors: Vec<f64>,
}

/// Everything a run produced; serialized as `run.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub library_version: String,
    pub config: RunConfig,
    /// The empty coalition is worth exactly 0 in the game; `rtilde2_empty`
    /// reports the R^2 of predictions from fully mean-imputed curves.
    pub empty_coalition_note: String,
    pub partition_cuts: Vec<f64>,
    pub replicas: Vec<ReplicaOutcome>,
    pub failed_replicas: Vec<FailedReplica>,
    pub mean: Vec<PredictorMean>,
    pub wall_clock_seconds: f64,
}

impl RunReport {
    /// Mean relevance function of one predictor across successful replicas.
    pub fn mean_relevance(&self, predictor: &str) -> Option<RelevanceFunction> {
        let partition = Partition::from_cuts(self.partition_cuts.clone()).ok()?;
        let mean = self.mean.iter().find(|m| m.name == predictor)?;
        RelevanceFunction::from_phi(partition, mean.phi.clone()).ok()
    }
}

/// Generate one replica's train/validation/test triplet from a scenario.
pub fn generate_triplet(scenario: &ScenarioSpec, seeds: &ReplicaSeeds) -> Result<DataTriplet> {
    let gen_set = |curve_seed: u64, noise_seed: u64| -> Result<(FunctionalSample, Vec<f64>)> {
        let curves = scenario
            .generate_curves(curve_seed)
            .map_err(|e| anyhow!("curve generation failed: {e}"))?;
        let (targets, _sigma) = scenario
            .targets(&curves, noise_seed)
            .map_err(|e| anyhow!("target generation failed: {e}"))?;
        Ok((curves, targets))
    };
    let (train, train_targets) = gen_set(seeds.train_curves, seeds.train_noise)?;
    let (validation, validation_targets) =
        gen_set(seeds.validation_curves, seeds.validation_noise)?;
    let (test, test_targets) = gen_set(seeds.test_curves, seeds.test_noise)?;
    Ok(DataTriplet {
        train,
        train_targets,
        validation,
        validation_targets,
        test,
        test_targets,
    })
}

/// Data for one replica, either generated from the scenario or shared
/// external files.
fn replica_data(
    config: &RunConfig,
    external: Option<&Arc<DataTriplet>>,
    seeds: &ReplicaSeeds,
) -> Result<Arc<DataTriplet>> {
    if let Some(data) = external {
        return Ok(Arc::clone(data));
    }
    let scenario: &ScenarioSpec = config
        .scenario
        .as_ref()
        .expect("validated: scenario present when no external data");
    Ok(Arc::new(generate_triplet(scenario, seeds)?))
}

/// A fitted predictor with its winning configuration and validation score
/// (both absent for families that need no tuning).
type FittedPredictor = (Arc<dyn Predictor>, Option<ModelConfig>, Option<f64>);

/// Fit one predictor spec on the replica's train/validation split.
fn fit_predictor(
    spec: &PredictorSpec,
    config: &RunConfig,
    data: &DataTriplet,
) -> Result<FittedPredictor> {
    match spec {
        PredictorSpec::Flm {
            basis_sizes,
            ridges,
        } => {
            let grid = SearchGrid::Flm {
                basis_sizes: basis_sizes.clone(),
                ridges: ridges.clone(),
            };
            let sel = select_hyperparameters(
                &grid,
                &data.train,
                &data.train_targets,
                &data.validation,
                &data.validation_targets,
            )?;
            Ok((sel.predictor, Some(sel.config), Some(sel.validation_r2)))
        }
        PredictorSpec::Fknn { neighbors } => {
            let grid = SearchGrid::Fknn {
                neighbors: neighbors.clone(),
            };
            let sel = select_hyperparameters(
                &grid,
                &data.train,
                &data.train_targets,
                &data.validation,
                &data.validation_targets,
            )?;
            Ok((sel.predictor, Some(sel.config), Some(sel.validation_r2)))
        }
        PredictorSpec::Oracle => {
            let scenario = config
                .scenario
                .as_ref()
                .expect("validated: oracle requires a scenario");
            Ok((
                Arc::new(OraclePredictor::new(scenario.transform)),
                None,
                None,
            ))
        }
        PredictorSpec::ConstantMean => Ok((
            Arc::new(ConstantMean::fit(&data.train_targets)?),
            None,
            None,
        )),
    }
}

/// Unique report names for the configured predictors ("flm", "flm_2", ...).
pub fn predictor_names(specs: &[PredictorSpec]) -> Vec<String> {
    let mut names = Vec::with_capacity(specs.len());
    for spec in specs {
        let base = spec.family_name().to_string();
        let mut name = base.clone();
        let mut suffix = 2;
        while names.contains(&name) {
            name = format!("{base}_{suffix}");
            suffix += 1;
        }
        names.push(name);
    }
    names
}

fn run_replica(
    config: &RunConfig,
    replica: usize,
    external: Option<&Arc<DataTriplet>>,
    names: &[String],
) -> Result<ReplicaOutcome> {
    let seeds = replica_seeds(config.master_seed, replica);
    let data = replica_data(config, external, &seeds)?;
    let n = config.intervals;
    let (lo, hi) = (data.test.grid().lo(), data.test.grid().hi());
    let partition =
        Partition::equal((lo, hi), n).map_err(|e| anyhow!("cannot build partition: {e}"))?;
    let moments = GaussianMoments::fit(&data.test)
        .map_err(|e| anyhow!("moment estimation on the test sample failed: {e}"))?;
    // one permutation batch per replica, shared by every predictor
    let batch = sample_permutations(n, config.permutations, seeds.permutations)
        .map_err(|e| anyhow!("permutation sampling failed: {e}"))?;

    let mut runs = Vec::with_capacity(config.predictors.len());
    for (spec, name) in config.predictors.iter().zip(names) {
        let started = Instant::now();
        let (predictor, selected_config, validation_r2) = fit_predictor(spec, config, &data)
            .with_context(|| format!("predictor {name} failed to fit"))?;
        let ctx = PayoffContext::new(
            predictor,
            moments.clone(),
            data.test.clone(),
            data.test_targets.clone(),
            partition.clone(),
        )
        .map_err(|e| anyhow!("payoff context for {name} failed: {e}"))?;

        let cache = if n <= UNBOUNDED_CACHE_PLAYER_LIMIT {
            PayoffCache::new()
        } else {
            PayoffCache::with_capacity_limit(CACHE_ENTRY_CAP)
        };
        let game = ctx.game(&cache);
        let result = shapley_monte_carlo(&game, &batch)
            .map_err(|e| anyhow!("relevance estimation for {name} failed: {e}"))?;
        let rtilde2_empty = ctx
            .rtilde_squared(Coalition::empty(n))
            .map_err(|e| anyhow!("empty-coalition payoff for {name} failed: {e}"))?;

        runs.push(PredictorRun {
            name: name.clone(),
            selected_config,
            validation_r2,
            r2_full: result.payoff_full(),
            nu_empty: result.payoff_empty(),
            rtilde2_empty,
            phi: result.phi().to_vec(),
            std_errors: result
                .std_errors()
                .map(|s| s.to_vec())
                .unwrap_or_else(|| vec![0.0; n]),
            cache: CacheStats {
                requests: cache.requests(),
                hits: cache.hits(),
                misses: cache.misses(),
                entries: cache.len(),
            },
            wall_clock_seconds: started.elapsed().as_secs_f64(),
        });
    }
    Ok(ReplicaOutcome {
        replica,
        seeds,
        predictors: runs,
    })
}

fn mean_over_replicas(names: &[String], replicas: &[ReplicaOutcome], n: usize) -> Vec<PredictorMean> {
    names
        .iter()
        .filter_map(|name| {
            let runs: Vec<&PredictorRun> = replicas
                .iter()
                .filter_map(|r| r.predictors.iter().find(|p| &p.name == name))
                .collect();
            let k = runs.len();
            if k == 0 {
                return None;
            }
            let avg = |f: &dyn Fn(&PredictorRun) -> f64| -> f64 {
                runs.iter().map(|r| f(r)).sum::<f64>() / k as f64
            };
            let avg_vec = |f: &dyn Fn(&PredictorRun) -> &Vec<f64>| -> Vec<f64> {
                (0..n)
                    .map(|i| runs.iter().map(|r| f(r)[i]).sum::<f64>() / k as f64)
                    .collect()
            };
            Some(PredictorMean {
                name: name.clone(),
                replicas_used: k,
                r2_full: avg(&|r| r.r2_full),
                nu_empty: avg(&|r| r.nu_empty),
                rtilde2_empty: avg(&|r| r.rtilde2_empty),
                phi: avg_vec(&|r| &r.phi),
                std_errors: avg_vec(&|r| &r.std_errors),
            })
        })
        .collect()
}

/// Execute every replica; fit failures skip the replica and are recorded.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    let started = Instant::now();
    let external = match &config.external {
        Some(ext) => Some(Arc::new(ingest_external(ext)?)),
        None => None,
    };
    let names = predictor_names(&config.predictors);

    let mut replicas = Vec::new();
    let mut failed = Vec::new();
    for replica in 0..config.replicas {
        match run_replica(config, replica, external.as_ref(), &names) {
            Ok(outcome) => replicas.push(outcome),
            Err(e) => {
                log::warn!("replica {} skipped: {e:#}", replica + 1);
                failed.push(FailedReplica {
                    replica,
                    error: format!("{e:#}"),
                });
            }
        }
    }
    if replicas.is_empty() {
        // still emit a report so the failure reasons land on disk
        log::error!("every replica failed");
    }

    let partition_cuts = match &external {
        Some(data) => {
            Partition::equal((data.test.grid().lo(), data.test.grid().hi()), config.intervals)
                .map_err(|e| anyhow!("cannot build partition: {e}"))?
                .cuts()
                .to_vec()
        }
        None => Partition::equal((0.0, 1.0), config.intervals)
            .map_err(|e| anyhow!("cannot build partition: {e}"))?
            .cuts()
            .to_vec(),
    };

    let mean = mean_over_replicas(&names, &replicas, config.intervals);
    Ok(RunReport {
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        empty_coalition_note: "the game assigns the empty coalition a payoff of exactly 0; \
                               rtilde2_empty reports the R^2 of predictions made from fully \
                               mean-imputed curves"
            .to_string(),
        partition_cuts,
        replicas,
        failed_replicas: failed,
        mean,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    })
}
