//! Writing run outputs: `relevance.csv`, `run.json`, and SVG plots.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use funshap::{Partition, RelevanceFunction};

use crate::runner::{PredictorRun, RunReport};
use crate::svg;

/// Write `relevance.csv`, `run.json`, and (if enabled) one SVG per predictor
/// into `dir`. Returns the paths written.
pub fn export_results(report: &RunReport, dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let mut written = Vec::new();

    let csv_path = dir.join("relevance.csv");
    std::fs::write(&csv_path, relevance_csv(report)?)
        .with_context(|| format!("cannot write {}", csv_path.display()))?;
    written.push(csv_path);

    let json_path = dir.join("run.json");
    let mut json = serde_json::to_string_pretty(report).context("cannot serialize run report")?;
    json.push('\n');
    std::fs::write(&json_path, json)
        .with_context(|| format!("cannot write {}", json_path.display()))?;
    written.push(json_path);

    if report.config.plot {
        for mean in &report.mean {
            if let Some(rf) = report.mean_relevance(&mean.name) {
                let svg_path = dir.join(format!("relevance_{}.svg", mean.name));
                std::fs::write(&svg_path, svg::relevance_svg(&rf, &mean.name))
                    .with_context(|| format!("cannot write {}", svg_path.display()))?;
                written.push(svg_path);
            }
        }
    }
    Ok(written)
}

/// One row per interval per predictor per replica, plus a `mean`
/// pseudo-replica whose numeric fields are the arithmetic means of the
/// replica rows.
pub fn relevance_csv(report: &RunReport) -> Result<String> {
    let partition = Partition::from_cuts(report.partition_cuts.clone())
        .map_err(|e| anyhow::anyhow!("bad partition cuts in report: {e}"))?;
    let mut out = String::new();
    out.push_str("predictor,replica,interval_index,a_i,b_i,phi,stderr,height\n");

    let mut write_rows = |name: &str,
                          replica_label: &str,
                          phi: &[f64],
                          stderr: &[f64]|
     -> Result<()> {
        let rf = RelevanceFunction::from_phi(partition.clone(), phi.to_vec())
            .map_err(|e| anyhow::anyhow!("relevance row construction failed: {e}"))?;
        for i in 0..partition.len() {
            let (a, b) = partition.interval(i);
            writeln!(
                out,
                "{name},{replica_label},{},{a},{b},{},{},{}",
                i + 1,
                phi[i],
                stderr[i],
                rf.heights()[i]
            )?;
        }
        Ok(())
    };

    for replica in &report.replicas {
        for run in &replica.predictors {
            write_rows(
                &run.name,
                &(replica.replica + 1).to_string(),
                &run.phi,
                &run.std_errors,
            )?;
        }
    }
    for mean in &report.mean {
        // mean rows are the arithmetic means of the replica rows
        let runs: Vec<&PredictorRun> = report
            .replicas
            .iter()
            .filter_map(|r| r.predictors.iter().find(|p| p.name == mean.name))
            .collect();
        let k = runs.len() as f64;
        let n = partition.len();
        let phi: Vec<f64> = (0..n)
            .map(|i| runs.iter().map(|r| r.phi[i]).sum::<f64>() / k)
            .collect();
        let stderr: Vec<f64> = (0..n)
            .map(|i| runs.iter().map(|r| r.std_errors[i]).sum::<f64>() / k)
            .collect();
        write_rows(&mean.name, "mean", &phi, &stderr)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runner::{CacheStats, ReplicaOutcome, ReplicaSeeds, RunReport};
    use crate::config::{PredictorSpec, RunConfig};
    use funshap::datagen::{ProcessKind, ScenarioSpec, TransformKind};

    fn tiny_report() -> RunReport {
        let config = RunConfig {
            scenario: Some(ScenarioSpec {
                process: ProcessKind::ToyParabola,
                transform: TransformKind::MinValue,
                sample_size: 10,
                grid_size: 11,
                noise_ratio: 0.0,
                fourier_terms: 30,
                seed: 0,
            }),
            external: None,
            intervals: 5,
            permutations: 10,
            master_seed: 1,
            replicas: 1,
            predictors: vec![PredictorSpec::Oracle],
            output_dir: "unused".into(),
            plot: false,
        };
        let run = PredictorRun {
            name: "oracle".into(),
            selected_config: None,
            validation_r2: None,
            r2_full: 1.0,
            nu_empty: 0.0,
            rtilde2_empty: -2.0,
            phi: vec![0.1, 0.2, 0.4, 0.2, 0.1],
            std_errors: vec![0.01; 5],
            cache: CacheStats {
                requests: 60,
                hits: 30,
                misses: 30,
                entries: 30,
            },
            wall_clock_seconds: 0.5,
        };
        RunReport {
            library_version: "0.0.0".into(),
            config,
            empty_coalition_note: String::new(),
            partition_cuts: vec![0.0, 0.2, 0.4, 0.6, 0.8, 1.0],
            replicas: vec![ReplicaOutcome {
                replica: 0,
                seeds: ReplicaSeeds {
                    train_curves: 0,
                    train_noise: 0,
                    validation_curves: 0,
                    validation_noise: 0,
                    test_curves: 0,
                    test_noise: 0,
                    permutations: 0,
                },
                predictors: vec![run.clone()],
            }],
            failed_replicas: vec![],
            mean: vec![crate::runner::PredictorMean {
                name: "oracle".into(),
                replicas_used: 1,
                r2_full: 1.0,
                nu_empty: 0.0,
                rtilde2_empty: -2.0,
                phi: run.phi.clone(),
                std_errors: run.std_errors.clone(),
            }],
            wall_clock_seconds: 1.0,
        }
    }

    #[test]
    fn csv_has_one_row_per_interval_per_replica_plus_mean() {
        let report = tiny_report();
        let csv = relevance_csv(&report).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        // header + 5 intervals x (1 replica + mean)
        assert_eq!(lines.len(), 1 + 5 * 2);
        assert_eq!(
            lines[0],
            "predictor,replica,interval_index,a_i,b_i,phi,stderr,height"
        );
        assert!(lines[1].starts_with("oracle,1,1,0,0.2,"));
        assert!(lines[6].starts_with("oracle,mean,1,"));
    }

    #[test]
    fn single_replica_mean_rows_equal_replica_rows() {
        let report = tiny_report();
        let csv = relevance_csv(&report).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        for i in 0..5 {
            let replica_fields: Vec<&str> = lines[1 + i].split(',').collect();
            let mean_fields: Vec<&str> = lines[6 + i].split(',').collect();
            assert_eq!(replica_fields[2..], mean_fields[2..]);
        }
    }
}
