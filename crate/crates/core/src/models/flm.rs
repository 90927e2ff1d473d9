//! Functional linear model fitted through a B-spline expansion of the
//! coefficient function.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::models::bspline::bspline_basis;
use crate::models::Predictor;
use crate::sample::FunctionalSample;

/// Scalar-on-function linear model: `prediction = intercept + integral of
/// beta(t) X(t) dt`, with `beta` expanded in a cubic B-spline basis and a ridge
/// penalty on the basis coefficients (never on the intercept).
#[derive(Debug, Clone)]
pub struct FunctionalLinearModel {
    grid: Grid,
    basis_size: usize,
    ridge: f64,
    intercept: f64,
    coefficients: DVector<f64>,
    beta_on_grid: DVector<f64>,
    /// Quadrature weights folded into `beta` so prediction is one dot product.
    beta_weighted: DVector<f64>,
}

/// Fit by ridge-regularized least squares on the design `D = X diag(w) B`,
/// solved through the normal equations with a symmetric (Cholesky) solve.
pub fn fit_flm(
    train: &FunctionalSample,
    targets: &[f64],
    basis_size: usize,
    ridge: f64,
) -> Result<FunctionalLinearModel> {
    let m = train.num_curves();
    if targets.len() != m {
        return Err(Error::InvalidArgument(format!(
            "{} targets for {m} curves",
            targets.len()
        )));
    }
    if m < 2 {
        return Err(Error::InsufficientSample { need: 2, got: m });
    }
    if ridge < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "ridge penalty must be non-negative, got {ridge}"
        )));
    }
    let grid = train.grid().clone();
    let basis = bspline_basis(&grid, basis_size)?;
    let weights = grid.trapezoid_weights();

    // design matrix D = X diag(w) B, m x K
    let x = train.values();
    let mut weighted = x.clone();
    for (h, &w) in weights.iter().enumerate() {
        weighted.column_mut(h).scale_mut(w);
    }
    let design = weighted * &basis;

    // normal equations over [intercept | coefficients]
    let k = basis_size;
    let mut normal = DMatrix::zeros(k + 1, k + 1);
    let mut rhs = DVector::zeros(k + 1);
    normal[(0, 0)] = m as f64;
    let col_sums: Vec<f64> = (0..k).map(|c| design.column(c).sum()).collect();
    for c in 0..k {
        normal[(0, c + 1)] = col_sums[c];
        normal[(c + 1, 0)] = col_sums[c];
    }
    let gram = design.transpose() * &design;
    for r in 0..k {
        for c in 0..k {
            normal[(r + 1, c + 1)] = gram[(r, c)] + if r == c { ridge } else { 0.0 };
        }
    }
    rhs[0] = targets.iter().sum();
    for c in 0..k {
        rhs[c + 1] = design
            .column(c)
            .iter()
            .zip(targets)
            .map(|(d, y)| d * y)
            .sum();
    }

    let chol = normal.cholesky().ok_or_else(|| {
        Error::Fit(format!(
            "normal equations are singular for basis size {k}; use a ridge penalty > 0"
        ))
    })?;
    let solution = chol.solve(&rhs);
    let intercept = solution[0];
    let coefficients = DVector::from_iterator(k, solution.iter().skip(1).copied());
    let beta_on_grid = &basis * &coefficients;
    let beta_weighted =
        DVector::from_fn(grid.len(), |h, _| weights[h] * beta_on_grid[h]);
    Ok(FunctionalLinearModel {
        grid,
        basis_size,
        ridge,
        intercept,
        coefficients,
        beta_on_grid,
        beta_weighted,
    })
}

impl FunctionalLinearModel {
    pub fn basis_size(&self) -> usize {
        self.basis_size
    }

    pub fn ridge(&self) -> f64 {
        self.ridge
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn coefficients(&self) -> &DVector<f64> {
        &self.coefficients
    }

    /// The fitted coefficient function evaluated on the training grid.
    pub fn beta_on_grid(&self) -> &DVector<f64> {
        &self.beta_on_grid
    }
}

impl Predictor for FunctionalLinearModel {
    fn predict(&self, sample: &FunctionalSample) -> Result<Vec<f64>> {
        if sample.grid() != &self.grid {
            return Err(Error::InvalidArgument(
                "sample grid does not match the grid the linear model was fitted on".into(),
            ));
        }
        let scores = sample.values() * &self.beta_weighted;
        Ok(scores.iter().map(|s| self.intercept + s).collect())
    }

    fn name(&self) -> &'static str {
        "flm"
    }
}
