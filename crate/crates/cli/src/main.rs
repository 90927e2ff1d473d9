use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};

use funshap_cli::config::RunConfig;
use funshap_cli::datasets::generate_datasets;
use funshap_cli::report::export_results;
use funshap_cli::runner;
use funshap_cli::selftest::run_selftest;

#[derive(Parser)]
#[command(
    name = "funshap",
    version,
    about = "Shapley-value relevance functions for scalar-on-function prediction models"
)]
struct Cli {
    /// Worker threads for permutation evaluation (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Overrides {
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the number of sampled permutations.
    #[arg(long)]
    permutations: Option<usize>,
    /// Override the number of partition intervals.
    #[arg(long)]
    intervals: Option<usize>,
    /// Override the replica count.
    #[arg(long)]
    replicas: Option<usize>,
    /// Skip SVG plot emission.
    #[arg(long)]
    no_plot: bool,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline described by a config file.
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Generate the scenario data sets only.
    Generate {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Skip generation: ingest external data and compute relevance.
    Relevance {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run the built-in invariant checks.
    Selftest,
}

fn apply_overrides(config: &mut RunConfig, overrides: &Overrides) {
    if let Some(seed) = overrides.seed {
        config.master_seed = seed;
    }
    if let Some(k) = overrides.permutations {
        config.permutations = k;
    }
    if let Some(n) = overrides.intervals {
        config.intervals = n;
    }
    if let Some(r) = overrides.replicas {
        config.replicas = r;
    }
    if overrides.no_plot {
        config.plot = false;
    }
    if let Some(out) = &overrides.out {
        config.output_dir = out.clone();
    }
}

fn load_config(path: &Path, overrides: &Overrides) -> Result<RunConfig> {
    let mut config = RunConfig::load(path)?;
    apply_overrides(&mut config, overrides);
    config.validate()?;
    Ok(config)
}

/// 0 on success, 1 on config or data errors, 2 on partial replica failure.
fn run_pipeline(path: &Path, overrides: &Overrides, require_external: bool) -> Result<u8> {
    let config = load_config(path, overrides)?;
    if require_external && config.external.is_none() {
        bail!("the relevance command needs a config with external data paths");
    }
    let report = runner::run(&config)?;
    let written = export_results(&report, &config.output_dir)?;
    for path in &written {
        println!("wrote {}", path.display());
    }
    for mean in &report.mean {
        println!(
            "{}: mean R2(I) = {:.4} over {} replica(s)",
            mean.name, mean.r2_full, mean.replicas_used
        );
    }
    if report.failed_replicas.is_empty() {
        Ok(0)
    } else {
        for f in &report.failed_replicas {
            eprintln!("replica {} failed: {}", f.replica + 1, f.error);
        }
        Ok(2)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();

    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: cannot configure {jobs} worker threads: {e}");
            return ExitCode::from(1);
        }
    }

    let outcome: Result<u8> = match &cli.command {
        Command::Run { config, overrides } => run_pipeline(config, overrides, false),
        Command::Relevance { config, overrides } => run_pipeline(config, overrides, true),
        Command::Generate { config, overrides } => {
            (|| {
                let config = load_config(config, overrides)?;
                let written = generate_datasets(&config)?;
                for path in &written {
                    println!("wrote {}", path.display());
                }
                Ok(0)
            })()
        }
        Command::Selftest => Ok(u8::from(run_selftest() > 0)),
    };

    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
