//! Gaussian moment estimation and conditional-expectation curve completion.
//!
//! A partially observed curve is completed by the conditional expectation of
//! its missing values given the observed ones under a fitted multivariate
//! normal: `mu_M + Sigma_MO Sigma_OO^+ (x_O - mu_O)`, evaluated for all curves
//! at once. `Sigma_OO^+` is the Moore-Penrose pseudo-inverse obtained by
//! inverting the non-zero eigenvalues and leaving zero eigenvalues in place.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::sample::FunctionalSample;

/// Estimated mean vector and covariance matrix of the curve process on the grid.
#[derive(Debug, Clone)]
pub struct GaussianMoments {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianMoments {
    /// Column means and the sample covariance with divisor `m - 1`, symmetrized
    /// as `(A + A^T) / 2`.
    pub fn fit(sample: &FunctionalSample) -> Result<Self> {
        let m = sample.num_curves();
        if m < 2 {
            return Err(Error::InsufficientSample { need: 2, got: m });
        }
        let x = sample.values();
        let t = x.ncols();
        let mean = DVector::from_fn(t, |h, _| x.column(h).sum() / m as f64);
        let mut centered = x.clone();
        for h in 0..t {
            centered.column_mut(h).add_scalar_mut(-mean[h]);
        }
        let mut cov = centered.transpose() * &centered / (m as f64 - 1.0);
        let sym = (&cov + cov.transpose()) / 2.0;
        cov = sym;
        Ok(Self { mean, cov })
    }

    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        if cov.nrows() != cov.ncols() || cov.nrows() != mean.len() {
            return Err(Error::InvalidArgument(format!(
                "moment dimensions do not agree: mean {} vs covariance {}x{}",
                mean.len(),
                cov.nrows(),
                cov.ncols()
            )));
        }
        check_symmetric(&cov, 1e-10)?;
        Ok(Self { mean, cov })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }
}

fn check_symmetric(matrix: &DMatrix<f64>, relative_tol: f64) -> Result<()> {
    let scale = matrix.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let tolerance = relative_tol * scale.max(f64::MIN_POSITIVE);
    let mut deviation = 0.0f64;
    for r in 0..matrix.nrows() {
        for c in (r + 1)..matrix.ncols() {
            deviation = deviation.max((matrix[(r, c)] - matrix[(c, r)]).abs());
        }
    }
    if deviation > tolerance {
        return Err(Error::NotSymmetric {
            deviation,
            tolerance,
        });
    }
    Ok(())
}

/// Default numerical-rank tolerance factor: `dim * machine epsilon`.
pub fn default_rank_tolerance(dim: usize) -> f64 {
    dim as f64 * f64::EPSILON
}

/// Moore-Penrose pseudo-inverse of a symmetric PSD matrix.
///
/// Eigenvalues at or below `tol * max(lambda, 0)` count as zero and stay zero;
/// the rest are inverted. Eigenvalues below `-tol * max_lambda` make the input
/// non-PSD and are rejected. `rank_tolerance` defaults to `dim * epsilon`.
pub fn pseudo_inverse_psd(
    matrix: &DMatrix<f64>,
    rank_tolerance: Option<f64>,
) -> Result<DMatrix<f64>> {
    if matrix.nrows() != matrix.ncols() {
        return Err(Error::InvalidArgument(format!(
            "expected a square matrix, got {}x{}",
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    if matrix.nrows() == 0 {
        return Ok(matrix.clone());
    }
    check_symmetric(matrix, 1e-8)?;
    let eig = SymmetricEigen::new(matrix.clone());
    let max_lambda = eig.eigenvalues.iter().fold(0.0f64, |a, &l| a.max(l));
    let tol = rank_tolerance.unwrap_or_else(|| default_rank_tolerance(matrix.nrows()));
    let threshold = tol * max_lambda;
    if let Some(&bad) = eig
        .eigenvalues
        .iter()
        .find(|&&l| l < -threshold && l < 0.0)
    {
        return Err(Error::NotPsd {
            eigenvalue: bad,
            tolerance: threshold,
        });
    }
    let inverted = DVector::from_fn(eig.eigenvalues.len(), |k, _| {
        let l = eig.eigenvalues[k];
        if l > threshold {
            1.0 / l
        } else {
            0.0
        }
    });
    let mut scaled = eig.eigenvectors.clone();
    for k in 0..scaled.ncols() {
        scaled.column_mut(k).scale_mut(inverted[k]);
    }
    let p = scaled * eig.eigenvectors.transpose();
    Ok((&p + p.transpose()) / 2.0)
}

/// Column split for one coalition plus the precomputed regression matrix
/// `Sigma_MO Sigma_OO^+` mapping centered observed values to missing ones.
#[derive(Debug, Clone)]
pub struct ReconstructionPlan {
    observed: Vec<usize>,
    missing: Vec<usize>,
    regression: DMatrix<f64>,
}

impl ReconstructionPlan {
    pub fn new(moments: &GaussianMoments, observed: &[usize]) -> Result<Self> {
        let t = moments.dim();
        let mut seen = vec![false; t];
        for &h in observed {
            if h >= t {
                return Err(Error::InvalidArgument(format!(
                    "observed index {h} out of bounds for dimension {t}"
                )));
            }
            seen[h] = true;
        }
        let observed: Vec<usize> = (0..t).filter(|&h| seen[h]).collect();
        let missing: Vec<usize> = (0..t).filter(|&h| !seen[h]).collect();

        let regression = if observed.is_empty() || missing.is_empty() {
            DMatrix::zeros(missing.len(), observed.len())
        } else {
            let cov = moments.cov();
            let soo = DMatrix::from_fn(observed.len(), observed.len(), |r, c| {
                cov[(observed[r], observed[c])]
            });
            let smo = DMatrix::from_fn(missing.len(), observed.len(), |r, c| {
                cov[(missing[r], observed[c])]
            });
            smo * pseudo_inverse_psd(&soo, None)?
        };
        Ok(Self {
            observed,
            missing,
            regression,
        })
    }

    pub fn observed(&self) -> &[usize] {
        &self.observed
    }

    pub fn missing(&self) -> &[usize] {
        &self.missing
    }

    pub fn regression(&self) -> &DMatrix<f64> {
        &self.regression
    }
}

/// Complete every curve at once: observed columns are copied verbatim, missing
/// columns become `mu_M + (X_O - mu_O) R^T` in one batched product.
pub fn reconstruct(
    plan: &ReconstructionPlan,
    moments: &GaussianMoments,
    sample: &FunctionalSample,
) -> Result<FunctionalSample> {
    let t = sample.grid().len();
    if moments.dim() != t || plan.observed.len() + plan.missing.len() != t {
        return Err(Error::InvalidArgument(format!(
            "plan/moments dimension does not match the sample grid ({t} points)"
        )));
    }
    if plan.missing.is_empty() {
        return Ok(sample.clone());
    }

    let mean = moments.mean();
    let mut out = sample.values().clone();
    if plan.observed.is_empty() {
        for &h in plan.missing.iter() {
            out.column_mut(h).fill(mean[h]);
        }
    } else {
        let m = sample.num_curves();
        let x = sample.values();
        let mut centered = DMatrix::zeros(m, plan.observed.len());
        for (c, &h) in plan.observed.iter().enumerate() {
            centered.set_column(c, &(x.column(h).add_scalar(-mean[h])));
        }
        let filled = centered * plan.regression.transpose();
        for (c, &h) in plan.missing.iter().enumerate() {
            out.set_column(h, &(filled.column(c).add_scalar(mean[h])));
        }
    }
    FunctionalSample::new(sample.grid().clone(), out)
}

/// The same completion computed through the eigenexpansion of `Sigma_OO`
/// (principal-component scores), row by row. Exists as an independent route
/// for equivalence checks against [`reconstruct`].
pub fn reconstruct_fpca_form(
    moments: &GaussianMoments,
    sample: &FunctionalSample,
    observed: &[usize],
) -> Result<FunctionalSample> {
    let t = sample.grid().len();
    if moments.dim() != t {
        return Err(Error::InvalidArgument(format!(
            "moments dimension {} does not match the sample grid ({t} points)",
            moments.dim()
        )));
    }
    let mut seen = vec![false; t];
    for &h in observed {
        if h >= t {
            return Err(Error::InvalidArgument(format!(
                "observed index {h} out of bounds for dimension {t}"
            )));
        }
        seen[h] = true;
    }
    let observed: Vec<usize> = (0..t).filter(|&h| seen[h]).collect();
    let missing: Vec<usize> = (0..t).filter(|&h| !seen[h]).collect();

    let mean = moments.mean();
    let mut out = sample.values().clone();
    if missing.is_empty() {
        return Ok(sample.clone());
    }
    if observed.is_empty() {
        for &h in &missing {
            out.column_mut(h).fill(mean[h]);
        }
        return FunctionalSample::new(sample.grid().clone(), out);
    }

    let cov = moments.cov();
    let soo = DMatrix::from_fn(observed.len(), observed.len(), |r, c| {
        cov[(observed[r], observed[c])]
    });
    let eig = SymmetricEigen::new(soo);
    let max_lambda = eig.eigenvalues.iter().fold(0.0f64, |a, &l| a.max(l));
    let threshold = default_rank_tolerance(observed.len()) * max_lambda;

    let x = sample.values();
    let m = sample.num_curves();
    for j in 0..m {
        // score of curve j on each retained eigenvector of Sigma_OO
        let mut completion = vec![0.0f64; missing.len()];
        for k in 0..eig.eigenvalues.len() {
            let lambda = eig.eigenvalues[k];
            if lambda <= threshold {
                continue;
            }
            let phi = eig.eigenvectors.column(k);
            let mut score = 0.0;
            for (d, &hd) in observed.iter().enumerate() {
                score += phi[d] * (x[(j, hd)] - mean[hd]);
            }
            for (u, &hu) in missing.iter().enumerate() {
                // gamma_u^T phi_k with gamma_u the row of Sigma_MO at u
                let mut proj = 0.0;
                for (d, &hd) in observed.iter().enumerate() {
                    proj += cov[(hu, hd)] * phi[d];
                }
                completion[u] += score * proj / lambda;
            }
        }
        for (u, &hu) in missing.iter().enumerate() {
            out[(j, hu)] = mean[hu] + completion[u];
        }
    }
    FunctionalSample::new(sample.grid().clone(), out)
}
