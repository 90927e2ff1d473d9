//! Loading and validating externally supplied data sets.

use anyhow::{bail, Context, Result};
use funshap::io::{read_sample_csv, read_targets_csv};
use funshap::{FunctionalSample, Grid};
use funshap::nalgebra::DMatrix;

use crate::config::ExternalData;

/// A matched train/validation/test set of curves and targets on one grid.
pub struct DataTriplet {
    pub train: FunctionalSample,
    pub train_targets: Vec<f64>,
    pub validation: FunctionalSample,
    pub validation_targets: Vec<f64>,
    pub test: FunctionalSample,
    pub test_targets: Vec<f64>,
}

/// Read the six CSV files, check grid and row-count consistency, and apply the
/// optional second-derivative preprocessing.
pub fn ingest_external(cfg: &ExternalData) -> Result<DataTriplet> {
    let train = read_sample_csv(&cfg.train_curves)
        .with_context(|| "reading train curves")?;
    let validation = read_sample_csv(&cfg.validation_curves)
        .with_context(|| "reading validation curves")?;
    let test = read_sample_csv(&cfg.test_curves).with_context(|| "reading test curves")?;

    check_same_grid(train.grid(), validation.grid(), "validation_curves")?;
    check_same_grid(train.grid(), test.grid(), "test_curves")?;

    let train_targets =
        read_targets_csv(&cfg.train_targets).with_context(|| "reading train targets")?;
    let validation_targets = read_targets_csv(&cfg.validation_targets)
        .with_context(|| "reading validation targets")?;
    let test_targets =
        read_targets_csv(&cfg.test_targets).with_context(|| "reading test targets")?;

    check_row_count(&train, &train_targets, "train")?;
    check_row_count(&validation, &validation_targets, "validation")?;
    check_row_count(&test, &test_targets, "test")?;

    let (train, validation, test) = if cfg.second_derivative {
        (
            second_derivative(&train)?,
            second_derivative(&validation)?,
            second_derivative(&test)?,
        )
    } else {
        (train, validation, test)
    };

    Ok(DataTriplet {
        train,
        train_targets,
        validation,
        validation_targets,
        test,
        test_targets,
    })
}

fn check_same_grid(reference: &Grid, other: &Grid, file_label: &str) -> Result<()> {
    if reference.len() != other.len() {
        bail!(
            "{file_label}: grid has {} points, train_curves has {}",
            other.len(),
            reference.len()
        );
    }
    for (h, (&a, &b)) in reference
        .points()
        .iter()
        .zip(other.points())
        .enumerate()
    {
        if a != b {
            bail!(
                "{file_label}: grid differs from train_curves at column {}: {b} vs {a}",
                h + 1
            );
        }
    }
    Ok(())
}

fn check_row_count(sample: &FunctionalSample, targets: &[f64], label: &str) -> Result<()> {
    if sample.num_curves() != targets.len() {
        bail!(
            "{label}: {} curves but {} targets",
            sample.num_curves(),
            targets.len()
        );
    }
    Ok(())
}

/// Pointwise second derivative by three-point differences: central in the
/// interior, one-sided (first/last interior triple) at the endpoints. Exact
/// for quadratics on any grid.
pub fn second_derivative(sample: &FunctionalSample) -> Result<FunctionalSample> {
    let t = sample.grid().len();
    if t < 3 {
        bail!("second derivatives need at least three grid points");
    }
    let pts = sample.grid().points();
    let x = sample.values();
    let m = sample.num_curves();
    let mut out = DMatrix::zeros(m, t);
    // curvature of the parabola through the triple centered at `center`
    let curvature = |j: usize, center: usize| -> f64 {
        let (i0, i1, i2) = (center - 1, center, center + 1);
        let h0 = pts[i1] - pts[i0];
        let h1 = pts[i2] - pts[i1];
        2.0 * (x[(j, i0)] * h1 - x[(j, i1)] * (h0 + h1) + x[(j, i2)] * h0)
            / (h0 * h1 * (h0 + h1))
    };
    for j in 0..m {
        out[(j, 0)] = curvature(j, 1);
        for c in 1..t - 1 {
            out[(j, c)] = curvature(j, c);
        }
        out[(j, t - 1)] = curvature(j, t - 2);
    }
    FunctionalSample::new(sample.grid().clone(), out)
        .map_err(|e| anyhow::anyhow!("second-derivative output invalid: {e}"))
}
