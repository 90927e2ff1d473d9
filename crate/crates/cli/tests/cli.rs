//! End-to-end checks of the command-line interface and its file outputs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use funshap_cli::svg::parse_step_segments;

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_funshap")
}

fn run_cli(args: &[&str]) -> Output {
    Command::new(binary())
        .args(args)
        .output()
        .expect("binary runs")
}

fn toy_config(out_dir: &Path, replicas: usize, plot: bool) -> String {
    format!(
        r#"{{
  "scenario": {{
    "process": "toy_parabola",
    "transform": "min_value",
    "sample_size": 50,
    "grid_size": 51,
    "noise_ratio": 0.0,
    "fourier_terms": 30,
    "seed": 0
  }},
  "intervals": 5,
  "permutations": 50,
  "master_seed": 41,
  "replicas": {replicas},
  "predictors": [{{"family": "oracle"}}, {{"family": "constant_mean"}}],
  "output_dir": "{}",
  "plot": {plot}
}}"#,
        out_dir.display()
    )
}

struct TempDir(PathBuf);

impl TempDir {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!(
            "funshap-cli-{tag}-{}-{}",
            std::process::id(),
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .unwrap()
                .as_nanos()
        ));
        std::fs::create_dir_all(&dir).unwrap();
        Self(dir)
    }

    fn path(&self) -> &Path {
        &self.0
    }
}

impl Drop for TempDir {
    fn drop(&mut self) {
        std::fs::remove_dir_all(&self.0).ok();
    }
}

#[test]
fn run_produces_expected_files_and_exit_zero() {
    let tmp = TempDir::new("run");
    let out = tmp.path().join("out");
    let config_path = tmp.path().join("config.json");
    std::fs::write(&config_path, toy_config(&out, 1, true)).unwrap();

    let result = run_cli(&["run", config_path.to_str().unwrap()]);
    assert!(
        result.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&result.stderr)
    );
    assert!(out.join("relevance.csv").is_file());
    assert!(out.join("run.json").is_file());
    assert!(out.join("relevance_oracle.svg").is_file());
    assert!(out.join("relevance_constant_mean.svg").is_file());

    // 5 intervals x 2 predictors x (1 replica + mean) + header
    let csv = std::fs::read_to_string(out.join("relevance.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 5 * 2 * 2);
}

#[test]
fn no_plot_flag_suppresses_svg_output() {
    let tmp = TempDir::new("noplot");
    let out = tmp.path().join("out");
    let config_path = tmp.path().join("config.json");
    std::fs::write(&config_path, toy_config(&out, 1, true)).unwrap();
    let result = run_cli(&["run", config_path.to_str().unwrap(), "--no-plot"]);
    assert!(result.status.success());
    assert!(out.join("relevance.csv").is_file());
    assert!(!out.join("relevance_oracle.svg").exists());
}

#[test]
fn mean_rows_are_arithmetic_means_of_replica_rows() {
    let tmp = TempDir::new("means");
    let out = tmp.path().join("out");
    let config_path = tmp.path().join("config.json");
    std::fs::write(&config_path, toy_config(&out, 3, false)).unwrap();
    let result = run_cli(&["run", config_path.to_str().unwrap()]);
    assert!(result.status.success());

    let csv = std::fs::read_to_string(out.join("relevance.csv")).unwrap();
    let mut phi_by_key: std::collections::HashMap<(String, usize), Vec<f64>> =
        std::collections::HashMap::new();
    let mut means: std::collections::HashMap<(String, usize), f64> =
        std::collections::HashMap::new();
    for line in csv.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let (pred, replica, idx) = (fields[0].to_string(), fields[1], fields[2]);
        let phi: f64 = fields[5].parse().unwrap();
        let key = (pred, idx.parse::<usize>().unwrap());
        if replica == "mean" {
            means.insert(key, phi);
        } else {
            phi_by_key.entry(key).or_default().push(phi);
        }
    }
    for (key, replicas) in &phi_by_key {
        assert_eq!(replicas.len(), 3);
        let mean = replicas.iter().sum::<f64>() / 3.0;
        let reported = means[key];
        assert!(
            (mean - reported).abs() <= 1e-12 * mean.abs().max(1.0),
            "{key:?}: {mean} vs {reported}"
        );
    }
}

#[test]
fn run_json_round_trip_reproduces_the_run() {
    let tmp = TempDir::new("roundtrip");
    let out1 = tmp.path().join("a");
    let config_path = tmp.path().join("config.json");
    std::fs::write(&config_path, toy_config(&out1, 1, false)).unwrap();
    assert!(run_cli(&["run", config_path.to_str().unwrap()]).status.success());

    // re-run from the config echoed inside run.json
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out1.join("run.json")).unwrap()).unwrap();
    let echoed = report.get("config").unwrap();
    let config2_path = tmp.path().join("echoed.json");
    std::fs::write(&config2_path, serde_json::to_string_pretty(echoed).unwrap()).unwrap();
    let out2 = tmp.path().join("b");
    assert!(run_cli(&[
        "run",
        config2_path.to_str().unwrap(),
        "--out",
        out2.to_str().unwrap()
    ])
    .status
    .success());

    let csv1 = std::fs::read(out1.join("relevance.csv")).unwrap();
    let csv2 = std::fs::read(out2.join("relevance.csv")).unwrap();
    assert_eq!(csv1, csv2);
}

#[test]
fn every_phi_row_satisfies_the_telescoping_identity() {
    let tmp = TempDir::new("telescope");
    let out = tmp.path().join("out");
    let config_path = tmp.path().join("config.json");
    std::fs::write(&config_path, toy_config(&out, 2, false)).unwrap();
    assert!(run_cli(&["run", config_path.to_str().unwrap()]).status.success());

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("run.json")).unwrap()).unwrap();
    for replica in report["replicas"].as_array().unwrap() {
        for run in replica["predictors"].as_array().unwrap() {
            let phi_sum: f64 = run["phi"]
                .as_array()
                .unwrap()
                .iter()
                .map(|v| v.as_f64().unwrap())
                .sum();
            let expect = run["r2_full"].as_f64().unwrap() - run["nu_empty"].as_f64().unwrap();
            assert!(
                (phi_sum - expect).abs() < 1e-10,
                "{}: {phi_sum} vs {expect}",
                run["name"]
            );
        }
    }
}

#[test]
fn svg_step_heights_match_the_csv() {
    let tmp = TempDir::new("svg");
    let out = tmp.path().join("out");
    let config_path = tmp.path().join("config.json");
    std::fs::write(&config_path, toy_config(&out, 1, true)).unwrap();
    assert!(run_cli(&["run", config_path.to_str().unwrap()]).status.success());

    let csv = std::fs::read_to_string(out.join("relevance.csv")).unwrap();
    let heights: Vec<f64> = csv
        .lines()
        .skip(1)
        .filter(|l| l.starts_with("oracle,mean,"))
        .map(|l| l.split(',').nth(7).unwrap().parse().unwrap())
        .collect();
    assert_eq!(heights.len(), 5);

    let svg = std::fs::read_to_string(out.join("relevance_oracle.svg")).unwrap();
    let segments = parse_step_segments(&svg);
    assert_eq!(segments.len(), 5);
    // pixel y is an affine map of the height: check slope consistency across
    // all pairs with distinct heights
    let mut slope: Option<f64> = None;
    for i in 0..5 {
        for j in (i + 1)..5 {
            if (heights[i] - heights[j]).abs() < 1e-12 {
                continue;
            }
            let s = (segments[i].2 - segments[j].2) / (heights[i] - heights[j]);
            if let Some(s0) = slope {
                assert!(
                    ((s - s0) / s0).abs() < 1e-2,
                    "inconsistent slopes {s0} vs {s}"
                );
            } else {
                slope = Some(s);
            }
        }
    }
    assert!(slope.is_some(), "no distinct heights to compare");
}

#[test]
fn generate_then_relevance_ingests_the_exported_files() {
    let tmp = TempDir::new("generate");
    let data_dir = tmp.path().join("data");
    let config_path = tmp.path().join("config.json");
    std::fs::write(&config_path, toy_config(&data_dir, 1, false)).unwrap();
    let gen = run_cli(&["generate", config_path.to_str().unwrap()]);
    assert!(gen.status.success());
    for name in [
        "train_curves.csv",
        "train_targets.csv",
        "validation_curves.csv",
        "validation_targets.csv",
        "test_curves.csv",
        "test_targets.csv",
    ] {
        assert!(data_dir.join("replica_001").join(name).is_file(), "{name}");
    }
    assert!(data_dir.join("generate.json").is_file());

    let replica = data_dir.join("replica_001");
    let out = tmp.path().join("out");
    let rel_config = format!(
        r#"{{
  "external": {{
    "train_curves": "{0}/train_curves.csv",
    "train_targets": "{0}/train_targets.csv",
    "validation_curves": "{0}/validation_curves.csv",
    "validation_targets": "{0}/validation_targets.csv",
    "test_curves": "{0}/test_curves.csv",
    "test_targets": "{0}/test_targets.csv"
  }},
  "intervals": 5,
  "permutations": 20,
  "master_seed": 9,
  "predictors": [{{"family": "fknn", "neighbors": [1, 3]}}],
  "output_dir": "{1}"
}}"#,
        replica.display(),
        out.display()
    );
    let rel_config_path = tmp.path().join("rel.json");
    std::fs::write(&rel_config_path, rel_config).unwrap();
    let rel = run_cli(&["relevance", rel_config_path.to_str().unwrap()]);
    assert!(
        rel.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&rel.stderr)
    );
    assert!(out.join("relevance.csv").is_file());
}

#[test]
fn relevance_requires_external_data() {
    let tmp = TempDir::new("relneedsext");
    let out = tmp.path().join("out");
    let config_path = tmp.path().join("config.json");
    std::fs::write(&config_path, toy_config(&out, 1, false)).unwrap();
    let result = run_cli(&["relevance", config_path.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(1));
}

#[test]
fn mismatched_external_grids_exit_with_config_error() {
    let tmp = TempDir::new("mismatch");
    let a = tmp.path().join("a.csv");
    let b = tmp.path().join("b.csv");
    let y = tmp.path().join("y.csv");
    std::fs::write(&a, "0,0.5,1\n1,2,3\n").unwrap();
    std::fs::write(&b, "0,0.6,1\n1,2,3\n").unwrap();
    std::fs::write(&y, "1\n").unwrap();
    let config = format!(
        r#"{{
  "external": {{
    "train_curves": "{a}", "train_targets": "{y}",
    "validation_curves": "{b}", "validation_targets": "{y}",
    "test_curves": "{a}", "test_targets": "{y}"
  }},
  "intervals": 2, "permutations": 5, "master_seed": 1,
  "predictors": [{{"family": "fknn", "neighbors": [1]}}],
  "output_dir": "{out}"
}}"#,
        a = a.display(),
        b = b.display(),
        y = y.display(),
        out = tmp.path().join("out").display()
    );
    let config_path = tmp.path().join("config.json");
    std::fs::write(&config_path, config).unwrap();
    let result = run_cli(&["run", config_path.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("column 2"), "stderr: {stderr}");
}

#[test]
fn failing_predictor_skips_replicas_and_signals_partial_failure() {
    let tmp = TempDir::new("partial");
    let out = tmp.path().join("out");
    // k-NN with more neighbours than training curves cannot fit
    let config = format!(
        r#"{{
  "scenario": {{
    "process": "toy_parabola", "transform": "min_value",
    "sample_size": 20, "grid_size": 31, "noise_ratio": 0.0,
    "fourier_terms": 30, "seed": 0
  }},
  "intervals": 4, "permutations": 10, "master_seed": 3, "replicas": 2,
  "predictors": [{{"family": "fknn", "neighbors": [500]}}],
  "output_dir": "{}"
}}"#,
        out.display()
    );
    let config_path = tmp.path().join("config.json");
    std::fs::write(&config_path, config).unwrap();
    let result = run_cli(&["run", config_path.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(2));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("run.json")).unwrap()).unwrap();
    assert_eq!(report["failed_replicas"].as_array().unwrap().len(), 2);
}

#[test]
fn selftest_passes_from_the_binary() {
    let result = run_cli(&["selftest"]);
    assert!(result.status.success());
    let stdout = String::from_utf8_lossy(&result.stdout);
    assert!(stdout.contains("all"), "stdout: {stdout}");
}

#[test]
fn second_derivative_preprocessing_applies_on_ingest() {
    let tmp = TempDir::new("secondderiv");
    // curves t^2 and 3t^2: second derivatives 2 and 6, constant over the grid
    let grid: Vec<f64> = (0..21).map(|i| i as f64 / 20.0).collect();
    let header: Vec<String> = grid.iter().map(|t| t.to_string()).collect();
    let row1: Vec<String> = grid.iter().map(|t| (t * t).to_string()).collect();
    let row2: Vec<String> = grid.iter().map(|t| (3.0 * t * t).to_string()).collect();
    let curves = format!(
        "{}\n{}\n{}\n",
        header.join(","),
        row1.join(","),
        row2.join(",")
    );
    let c = tmp.path().join("c.csv");
    let y = tmp.path().join("y.csv");
    std::fs::write(&c, &curves).unwrap();
    std::fs::write(&y, "1\n2\n").unwrap();
    let ext = funshap_cli::config::ExternalData {
        train_curves: c.clone(),
        train_targets: y.clone(),
        validation_curves: c.clone(),
        validation_targets: y.clone(),
        test_curves: c,
        test_targets: y,
        second_derivative: true,
    };
    let data = funshap_cli::ingest::ingest_external(&ext).unwrap();
    for h in 1..20 {
        assert!((data.train.values()[(0, h)] - 2.0).abs() < 1e-6);
        assert!((data.train.values()[(1, h)] - 6.0).abs() < 1e-6);
    }
}
