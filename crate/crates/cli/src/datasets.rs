//! The `generate` verb: write scenario data sets to disk without running the
//! relevance pipeline.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use funshap::io::{write_sample_csv, write_targets_csv};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::runner::{generate_triplet, replica_seeds, ReplicaSeeds};

/// Manifest written next to the generated files.
#[derive(Debug, Serialize, Deserialize)]
pub struct GenerateManifest {
    pub library_version: String,
    pub config: RunConfig,
    pub replica_seeds: Vec<ReplicaSeeds>,
}

/// Generate `replicas` train/validation/test triplets under
/// `output_dir/replica_NNN/` and return every path written.
pub fn generate_datasets(config: &RunConfig) -> Result<Vec<PathBuf>> {
    config.validate()?;
    let Some(scenario) = &config.scenario else {
        bail!("the generate command needs a scenario config");
    };
    std::fs::create_dir_all(&config.output_dir).with_context(|| {
        format!(
            "cannot create output directory {}",
            config.output_dir.display()
        )
    })?;

    let mut written = Vec::new();
    let mut seeds_used = Vec::new();
    for replica in 0..config.replicas {
        let seeds = replica_seeds(config.master_seed, replica);
        let data = generate_triplet(scenario, &seeds)?;
        let dir = config
            .output_dir
            .join(format!("replica_{:03}", replica + 1));
        std::fs::create_dir_all(&dir)
            .with_context(|| format!("cannot create {}", dir.display()))?;

        let write_pair =
            |name: &str, sample: &funshap::FunctionalSample, targets: &[f64], written: &mut Vec<PathBuf>| -> Result<()> {
                let curves = dir.join(format!("{name}_curves.csv"));
                write_sample_csv(&curves, sample)
                    .map_err(|e| anyhow::anyhow!("writing {}: {e}", curves.display()))?;
                written.push(curves);
                let t = dir.join(format!("{name}_targets.csv"));
                write_targets_csv(&t, targets)
                    .map_err(|e| anyhow::anyhow!("writing {}: {e}", t.display()))?;
                written.push(t);
                Ok(())
            };
        write_pair("train", &data.train, &data.train_targets, &mut written)?;
        write_pair(
            "validation",
            &data.validation,
            &data.validation_targets,
            &mut written,
        )?;
        write_pair("test", &data.test, &data.test_targets, &mut written)?;
        seeds_used.push(seeds);
    }

    let manifest = GenerateManifest {
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        replica_seeds: seeds_used,
    };
    let path = config.output_dir.join("generate.json");
    let mut json = serde_json::to_string_pretty(&manifest)?;
    json.push('\n');
    std::fs::write(&path, json).with_context(|| format!("cannot write {}", path.display()))?;
    written.push(path);
    Ok(written)
}

/// Paths of one generated replica, wired for the `external` config section.
pub fn replica_paths(output_dir: &Path, replica: usize) -> crate::config::ExternalData {
    let dir = output_dir.join(format!("replica_{:03}", replica + 1));
    crate::config::ExternalData {
        train_curves: dir.join("train_curves.csv"),
        train_targets: dir.join("train_targets.csv"),
        validation_curves: dir.join("validation_curves.csv"),
        validation_targets: dir.join("validation_targets.csv"),
        test_curves: dir.join("test_curves.csv"),
        test_targets: dir.join("test_targets.csv"),
        second_derivative: false,
    }
}
