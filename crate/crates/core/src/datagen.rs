//! Synthetic functional processes, target transformations, and noise control.
//!
//! Three curve generators (Fourier expansion, its symmetrized variant, and
//! Brownian motion with a linear trend) plus the noisy-parabola toy process.
//! Targets come from five transformations of a curve; observation noise is
//! added at a controlled signal-to-noise ratio.
//!
//! Every generator draws row `j` from the ChaCha stream `j` of the given seed,
//! so rows are reproducible independently of evaluation order.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::grid::{trapezoid_quadrature, Grid};
use crate::sample::FunctionalSample;

/// Curve-generating process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessKind {
    Fourier,
    SymmetricFourier,
    BrownianTrend,
    ToyParabola,
}

/// Target transformation applied to each curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    LinearUnimodal,
    LinearBimodal,
    NonLinear,
    Discrete,
    MinValue,
}

/// One simulation scenario: process, transformation, sizes, noise level, seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub process: ProcessKind,
    pub transform: TransformKind,
    /// Number of curves per generated data set.
    pub sample_size: usize,
    /// Number of grid points over [0, 1].
    pub grid_size: usize,
    /// Fraction of target variance due to noise, in [0, 1).
    pub noise_ratio: f64,
    /// Fourier truncation order (even); ignored by the other processes.
    pub fourier_terms: usize,
    pub seed: u64,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        if self.sample_size == 0 {
            return Err(Error::InvalidArgument("sample_size must be positive".into()));
        }
        if self.grid_size < 2 {
            return Err(Error::InvalidArgument("grid_size must be at least 2".into()));
        }
        if !(0.0..1.0).contains(&self.noise_ratio) {
            return Err(Error::InvalidArgument(format!(
                "noise_ratio must lie in [0, 1), got {}",
                self.noise_ratio
            )));
        }
        if !self.fourier_terms.is_multiple_of(2) || self.fourier_terms == 0 {
            return Err(Error::InvalidArgument(format!(
                "fourier_terms must be a positive even number, got {}",
                self.fourier_terms
            )));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::uniform(0.0, 1.0, self.grid_size)
    }

    /// Generate the curves of one data set with the given seed.
    pub fn generate_curves(&self, seed: u64) -> Result<FunctionalSample> {
        self.validate()?;
        let grid = self.grid()?;
        match self.process {
            ProcessKind::Fourier => gen_fourier(&grid, self.sample_size, self.fourier_terms, seed),
            ProcessKind::SymmetricFourier => {
                gen_symmetric_fourier(&grid, self.sample_size, self.fourier_terms, seed)
            }
            ProcessKind::BrownianTrend => gen_brownian_trend(&grid, self.sample_size, seed),
            ProcessKind::ToyParabola => {
                gen_toy_parabola(&grid, self.sample_size, TOY_NOISE_SD, seed)
            }
        }
    }

    /// Transform curves into targets and add noise at the configured ratio.
    /// Returns the noisy targets and the noise standard deviation used.
    pub fn targets(&self, sample: &FunctionalSample, noise_seed: u64) -> Result<(Vec<f64>, f64)> {
        let clean = apply_transform(sample, self.transform)?;
        add_noise(&clean, self.noise_ratio, noise_seed)
    }
}

/// Pointwise noise level of the toy parabola process.
pub const TOY_NOISE_SD: f64 = 0.01;

fn row_rng(seed: u64, row: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(row as u64);
    rng
}

/// Fourier basis on the grid: constant column, then `sqrt(2) sin(2 pi k t)` and
/// `sqrt(2) cos(2 pi k t)` for `k = 1 .. terms/2`. Shape `T x (terms + 1)`.
pub fn fourier_basis(grid: &Grid, terms: usize) -> Result<DMatrix<f64>> {
    if !terms.is_multiple_of(2) || terms == 0 {
        return Err(Error::InvalidArgument(format!(
            "the Fourier truncation must be a positive even number, got {terms}"
        )));
    }
    let t = grid.len();
    let mut basis = DMatrix::zeros(t, terms + 1);
    let sqrt2 = 2.0f64.sqrt();
    for (h, &tp) in grid.points().iter().enumerate() {
        basis[(h, 0)] = 1.0;
        for k in 1..=terms / 2 {
            let arg = 2.0 * std::f64::consts::PI * k as f64 * tp;
            basis[(h, 2 * k - 1)] = sqrt2 * arg.sin();
            basis[(h, 2 * k)] = sqrt2 * arg.cos();
        }
    }
    Ok(basis)
}

/// Curves `sum_s z_s xi_s(t)` with independent standard-normal scores per row.
pub fn gen_fourier(grid: &Grid, m: usize, terms: usize, seed: u64) -> Result<FunctionalSample> {
    let basis = fourier_basis(grid, terms)?;
    gen_from_basis(grid, &basis, m, seed)
}

/// Symmetrized Fourier curves `X(t) + X(1 - t)` sharing one score draw per row.
///
/// The mirrored component is evaluated analytically from the basis, so the
/// construction is exact on any grid; a warning is logged when the grid itself
/// is not symmetric about the domain midpoint (the mirror symmetry of the rows
/// cannot then be checked pointwise).
pub fn gen_symmetric_fourier(
    grid: &Grid,
    m: usize,
    terms: usize,
    seed: u64,
) -> Result<FunctionalSample> {
    if !grid.is_symmetric() {
        log::warn!(
            "symmetric Fourier process generated on a grid that is not symmetric \
             about its midpoint; row symmetry is unverifiable on this grid"
        );
    }
    let basis = fourier_basis(grid, terms)?;
    let mirrored_points: Vec<f64> = grid.points().iter().map(|&t| 1.0 - t).collect();
    let sqrt2 = 2.0f64.sqrt();
    let mut combined = basis;
    for (h, &tp) in mirrored_points.iter().enumerate() {
        combined[(h, 0)] += 1.0;
        for k in 1..=terms / 2 {
            let arg = 2.0 * std::f64::consts::PI * k as f64 * tp;
            combined[(h, 2 * k - 1)] += sqrt2 * arg.sin();
            combined[(h, 2 * k)] += sqrt2 * arg.cos();
        }
    }
    gen_from_basis(grid, &combined, m, seed)
}

fn gen_from_basis(
    grid: &Grid,
    basis: &DMatrix<f64>,
    m: usize,
    seed: u64,
) -> Result<FunctionalSample> {
    if m == 0 {
        return Err(Error::InvalidArgument("sample size must be positive".into()));
    }
    let t = grid.len();
    let k = basis.ncols();
    let mut values = DMatrix::zeros(m, t);
    for j in 0..m {
        let mut rng = row_rng(seed, j);
        let scores: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
        for h in 0..t {
            let mut acc = 0.0;
            for (s, &z) in scores.iter().enumerate() {
                acc += basis[(h, s)] * z;
            }
            values[(j, h)] = acc;
        }
    }
    FunctionalSample::new(grid.clone(), values)
}

/// Brownian motion plus a linear trend: `B(t) + t` with `B(t_1) = 0`.
pub fn gen_brownian_trend(grid: &Grid, m: usize, seed: u64) -> Result<FunctionalSample> {
    if m == 0 {
        return Err(Error::InvalidArgument("sample size must be positive".into()));
    }
    if grid.lo().abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "the Brownian-trend process needs a grid starting at 0, got {}",
            grid.lo()
        )));
    }
    let t = grid.len();
    let pts = grid.points();
    let mut values = DMatrix::zeros(m, t);
    for j in 0..m {
        let mut rng = row_rng(seed, j);
        let mut b = 0.0;
        values[(j, 0)] = b + pts[0];
        for h in 1..t {
            let dt = pts[h] - pts[h - 1];
            let z: f64 = rng.sample(StandardNormal);
            b += dt.sqrt() * z;
            values[(j, h)] = b + pts[h];
        }
    }
    FunctionalSample::new(grid.clone(), values)
}

/// Noisy parabola `(t - 0.5)^2 + e(t)` with independent `N(0, sd^2)` noise per
/// grid point.
pub fn gen_toy_parabola(
    grid: &Grid,
    m: usize,
    noise_sd: f64,
    seed: u64,
) -> Result<FunctionalSample> {
    if m == 0 {
        return Err(Error::InvalidArgument("sample size must be positive".into()));
    }
    if noise_sd < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "noise standard deviation must be non-negative, got {noise_sd}"
        )));
    }
    let t = grid.len();
    let pts = grid.points();
    let mut values = DMatrix::zeros(m, t);
    for j in 0..m {
        let mut rng = row_rng(seed, j);
        for h in 0..t {
            let base = (pts[h] - 0.5) * (pts[h] - 0.5);
            let noise = if noise_sd > 0.0 {
                noise_sd * rng.sample::<f64, _>(StandardNormal)
            } else {
                0.0
            };
            values[(j, h)] = base + noise;
        }
    }
    FunctionalSample::new(grid.clone(), values)
}

/// Beta density `t^(a-1) (1-t)^(b-1) / B(a, b)` with a log-gamma normalizer.
pub fn beta_density(t: f64, a: f64, b: f64) -> Result<f64> {
    if a <= 0.0 || b <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "beta parameters must be positive, got ({a}, {b})"
        )));
    }
    if !(0.0..=1.0).contains(&t) {
        return Ok(0.0);
    }
    let log_norm = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b);
    if t == 0.0 || t == 1.0 {
        let exponent = if t == 0.0 { a - 1.0 } else { b - 1.0 };
        return Ok(if exponent > 0.0 {
            0.0
        } else if exponent == 0.0 {
            log_norm.exp()
        } else {
            f64::INFINITY
        });
    }
    Ok((log_norm + (a - 1.0) * t.ln() + (b - 1.0) * (1.0 - t).ln()).exp())
}

/// The unimodal weight function: the Beta(30, 90) density evaluated on the grid.
pub fn unimodal_weights(grid: &Grid) -> Result<Vec<f64>> {
    grid.points().iter().map(|&t| beta_density(t, 30.0, 90.0)).collect()
}

/// The bimodal weight function `(beta_u(t) + beta_u(1 - t)) / 2` on the grid.
pub fn bimodal_weights(grid: &Grid) -> Result<Vec<f64>> {
    grid.points()
        .iter()
        .map(|&t| {
            Ok((beta_density(t, 30.0, 90.0)? + beta_density(1.0 - t, 30.0, 90.0)?) / 2.0)
        })
        .collect()
}

/// Evaluation abscissae of the discrete transformation.
const DISCRETE_POINTS: [f64; 4] = [0.15, 0.55, 0.35, 0.85];

/// Apply a target transformation to every curve.
pub fn apply_transform(sample: &FunctionalSample, kind: TransformKind) -> Result<Vec<f64>> {
    let grid = sample.grid();
    let m = sample.num_curves();
    let x = sample.values();
    match kind {
        TransformKind::LinearUnimodal => {
            let w = unimodal_weights(grid)?;
            (0..m)
                .map(|j| {
                    let prod: Vec<f64> =
                        (0..grid.len()).map(|h| x[(j, h)] * w[h]).collect();
                    trapezoid_quadrature(grid, &prod)
                })
                .collect()
        }
        TransformKind::LinearBimodal => {
            let w = bimodal_weights(grid)?;
            (0..m)
                .map(|j| {
                    let prod: Vec<f64> =
                        (0..grid.len()).map(|h| x[(j, h)] * w[h]).collect();
                    trapezoid_quadrature(grid, &prod)
                })
                .collect()
        }
        TransformKind::NonLinear => {
            if !grid.is_symmetric() {
                return Err(Error::InvalidArgument(
                    "the non-linear transformation mirrors curve values by grid index \
                     and needs a grid symmetric about its midpoint"
                        .into(),
                ));
            }
            let w = unimodal_weights(grid)?;
            let t = grid.len();
            Ok((0..m)
                .map(|j| {
                    (0..t)
                        .map(|h| {
                            let direct = (w[h] * x[(j, h)]).abs();
                            let mirrored = (w[h] * x[(j, t - 1 - h)]).abs();
                            direct.max(mirrored)
                        })
                        .fold(f64::NEG_INFINITY, f64::max)
                })
                .collect())
        }
        TransformKind::Discrete => {
            let idx: Vec<usize> = DISCRETE_POINTS
                .iter()
                .map(|&p| grid.nearest_index(p))
                .collect();
            Ok((0..m)
                .map(|j| {
                    let x015 = x[(j, idx[0])];
                    let x055 = x[(j, idx[1])];
                    let x035 = x[(j, idx[2])];
                    let x085 = x[(j, idx[3])];
                    x015 + x055.abs() + x035 * x035 * x085
                })
                .collect())
        }
        TransformKind::MinValue => Ok((0..m)
            .map(|j| x.row(j).iter().copied().fold(f64::INFINITY, f64::min))
            .collect()),
    }
}

/// Add observation noise at signal-to-noise ratio `ratio`:
/// `sigma^2 = ratio * var(values) / (1 - ratio)` with the `m - 1` divisor, so
/// that `sigma^2 / (var + sigma^2) = ratio`. Returns targets and `sigma`.
pub fn add_noise(values: &[f64], ratio: f64, seed: u64) -> Result<(Vec<f64>, f64)> {
    if !(0.0..1.0).contains(&ratio) {
        return Err(Error::InvalidArgument(format!(
            "noise ratio must lie in [0, 1), got {ratio}"
        )));
    }
    if ratio == 0.0 {
        return Ok((values.to_vec(), 0.0));
    }
    if values.len() < 2 {
        return Err(Error::InvalidArgument(
            "need at least two values to scale noise by their variance".into(),
        ));
    }
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0);
    if var <= 0.0 {
        return Err(Error::InvalidArgument(
            "values have zero variance; a positive noise ratio is impossible".into(),
        ));
    }
    let sigma = (ratio * var / (1.0 - ratio)).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noisy = values
        .iter()
        .map(|v| v + sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();
    Ok((noisy, sigma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid101() -> Grid {
        Grid::uniform(0.0, 1.0, 101).unwrap()
    }

    #[test]
    fn fourier_basis_values() {
        let g = grid101();
        let b = fourier_basis(&g, 2).unwrap();
        assert!(b.column(0).iter().all(|&v| v == 1.0));
        // t = 0.25: sin(pi/2) = 1, cos(pi/2) = 0
        assert_abs_diff_eq!(b[(25, 1)], 2.0f64.sqrt(), epsilon = 1e-12);
        assert!(b[(25, 2)].abs() < 1e-12);
        assert!(fourier_basis(&g, 3).is_err());
    }

    #[test]
    fn fourier_basis_nearly_orthonormal_under_quadrature() {
        let g = grid101();
        let b = fourier_basis(&g, 30).unwrap();
        for i in 0..31 {
            for j in i..31 {
                let prod: Vec<f64> = (0..g.len()).map(|h| b[(h, i)] * b[(h, j)]).collect();
                let q = trapezoid_quadrature(&g, &prod).unwrap();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (q - expect).abs() < 0.02,
                    "gram[{i},{j}] = {q}, expected {expect}"
                );
            }
        }
    }

    #[test]
    fn generators_are_deterministic_per_seed() {
        let g = grid101();
        let a = gen_fourier(&g, 5, 30, 7).unwrap();
        let b = gen_fourier(&g, 5, 30, 7).unwrap();
        assert_eq!(a.values(), b.values());
        let c = gen_fourier(&g, 5, 30, 8).unwrap();
        assert_ne!(a.values(), c.values());

        let s1 = gen_symmetric_fourier(&g, 4, 30, 3).unwrap();
        let s2 = gen_symmetric_fourier(&g, 4, 30, 3).unwrap();
        assert_eq!(s1.values(), s2.values());
    }

    #[test]
    fn fourier_moments_match_theory() {
        // Monte-Carlo oracle for the process mean and pointwise variance
        let g = Grid::uniform(0.0, 1.0, 21).unwrap();
        let m = 10_000;
        let s = gen_fourier(&g, m, 30, 123).unwrap();
        let basis = fourier_basis(&g, 30).unwrap();
        // pointwise std is sqrt(31), so the Monte-Carlo standard error of the
        // mean at m = 10^4 is 0.056; 0.25 is a 4.5-sigma bound
        for h in (0..21).step_by(5) {
            let col = s.values().column(h);
            let mean = col.sum() / m as f64;
            assert!(mean.abs() < 0.25, "mean at point {h} is {mean}");
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m as f64 - 1.0);
            let expected: f64 = (0..31).map(|sx| basis[(h, sx)] * basis[(h, sx)]).sum();
            assert!(
                (var - expected).abs() / expected < 0.10,
                "variance at point {h}: {var} vs {expected}"
            );
        }
    }

    #[test]
    fn symmetric_fourier_rows_mirror() {
        let g = grid101();
        let s = gen_symmetric_fourier(&g, 6, 30, 11).unwrap();
        let t = g.len();
        for j in 0..6 {
            for h in 0..t {
                let diff = (s.values()[(j, h)] - s.values()[(j, t - 1 - h)]).abs();
                assert!(diff < 1e-12, "row {j} asymmetric at {h}: {diff}");
            }
        }
    }

    #[test]
    fn symmetric_fourier_variance_at_midpoint() {
        let g = Grid::uniform(0.0, 1.0, 11).unwrap();
        let m = 10_000;
        let s = gen_symmetric_fourier(&g, m, 30, 77).unwrap();
        let f = gen_fourier(&g, m, 30, 78).unwrap();
        let mid = 5;
        let var = |col: nalgebra::DVectorView<f64>| {
            let mu = col.sum() / m as f64;
            col.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / (m as f64 - 1.0)
        };
        let vs = var(s.values().column(mid));
        let vf = var(f.values().column(mid));
        assert!(
            (vs - 4.0 * vf).abs() / (4.0 * vf) < 0.10,
            "midpoint variance {vs} vs 4x{vf}"
        );
    }

    #[test]
    fn brownian_trend_moments() {
        let g = Grid::uniform(0.0, 1.0, 21).unwrap();
        let m = 10_000;
        let s = gen_brownian_trend(&g, m, 99).unwrap();
        for j in 0..5 {
            assert_eq!(s.values()[(j, 0)], 0.0);
        }
        for h in [5usize, 10, 20] {
            let t = g.points()[h];
            let col = s.values().column(h);
            let mean = col.sum() / m as f64;
            assert!((mean - t).abs() < 0.05, "mean at t={t}: {mean}");
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m as f64 - 1.0);
            assert!((var - t).abs() / t < 0.10, "variance at t={t}: {var}");
        }
        let bad = Grid::uniform(0.5, 1.0, 11).unwrap();
        assert!(gen_brownian_trend(&bad, 3, 1).is_err());
    }

    #[test]
    fn toy_parabola_with_zero_noise_is_deterministic() {
        let g = grid101();
        let s = gen_toy_parabola(&g, 3, 0.0, 5).unwrap();
        for j in 0..3 {
            for (h, &t) in g.points().iter().enumerate() {
                assert_eq!(s.values()[(j, h)], (t - 0.5) * (t - 0.5));
            }
        }
    }

    #[test]
    fn toy_parabola_noise_scale() {
        let g = Grid::uniform(0.0, 1.0, 5).unwrap();
        let m = 10_000;
        let s = gen_toy_parabola(&g, m, TOY_NOISE_SD, 2).unwrap();
        for h in 0..5 {
            let t = g.points()[h];
            let col = s.values().column(h);
            let mu = col.sum() / m as f64;
            let sd = (col
                .iter()
                .map(|v| (v - mu) * (v - mu))
                .sum::<f64>()
                / (m as f64 - 1.0))
                .sqrt();
            assert!((sd - 0.01).abs() / 0.01 < 0.10, "sd at t={t}: {sd}");
        }
    }

    #[test]
    fn beta_density_properties() {
        // uniform case
        assert_abs_diff_eq!(beta_density(0.3, 1.0, 1.0).unwrap(), 1.0, epsilon = 1e-12);
        assert!(beta_density(0.5, 0.0, 1.0).is_err());
        // mode of Beta(30, 90) at 29/118
        let mode = 29.0 / 118.0;
        let at_mode = beta_density(mode, 30.0, 90.0).unwrap();
        for dt in [-0.01, 0.01] {
            assert!(at_mode > beta_density(mode + dt, 30.0, 90.0).unwrap());
        }
        // density integrates to one
        let g = grid101();
        let w = unimodal_weights(&g).unwrap();
        let q = trapezoid_quadrature(&g, &w).unwrap();
        assert!((q - 1.0).abs() < 1e-3, "integral {q}");
        // endpoints vanish for a, b > 1
        assert_eq!(beta_density(0.0, 30.0, 90.0).unwrap(), 0.0);
        assert_eq!(beta_density(1.0, 30.0, 90.0).unwrap(), 0.0);
    }

    #[test]
    fn bimodal_weights_mirror_and_normalize() {
        let g = grid101();
        let w = bimodal_weights(&g).unwrap();
        let t = g.len();
        for h in 0..t {
            assert_abs_diff_eq!(w[h], w[t - 1 - h], epsilon = 1e-12);
        }
        let q = trapezoid_quadrature(&g, &w).unwrap();
        assert!((q - 1.0).abs() < 1e-3);
    }

    #[test]
    fn transforms_on_simple_curves() {
        let g = grid101();
        let zeros = FunctionalSample::from_rows(g.clone(), &[vec![0.0; 101]]).unwrap();
        for kind in [
            TransformKind::LinearUnimodal,
            TransformKind::LinearBimodal,
            TransformKind::NonLinear,
            TransformKind::Discrete,
            TransformKind::MinValue,
        ] {
            assert_eq!(apply_transform(&zeros, kind).unwrap()[0], 0.0, "{kind:?}");
        }

        let ones = FunctionalSample::from_rows(g.clone(), &[vec![1.0; 101]]).unwrap();
        let lu = apply_transform(&ones, TransformKind::LinearUnimodal).unwrap()[0];
        assert!((lu - 1.0).abs() < 1e-3, "unimodal on constant one: {lu}");
        let d = apply_transform(&ones, TransformKind::Discrete).unwrap()[0];
        assert_abs_diff_eq!(d, 3.0, epsilon = 1e-12);

        let parabola: Vec<f64> = g.points().iter().map(|t| (t - 0.5) * (t - 0.5)).collect();
        let p = FunctionalSample::from_rows(g.clone(), &[parabola]).unwrap();
        assert_eq!(apply_transform(&p, TransformKind::MinValue).unwrap()[0], 0.0);
    }

    #[test]
    fn nonlinear_transform_requires_symmetric_grid() {
        let g = Grid::new(vec![0.0, 0.2, 0.7, 1.0]).unwrap();
        let s = FunctionalSample::from_rows(g, &[vec![1.0; 4]]).unwrap();
        assert!(apply_transform(&s, TransformKind::NonLinear).is_err());
    }

    #[test]
    fn linear_unimodal_transform_is_linear_in_the_curve() {
        let g = grid101();
        let f: Vec<f64> = g.points().iter().map(|t| t.sin()).collect();
        let h: Vec<f64> = g.points().iter().map(|t| (3.0 * t).cos()).collect();
        let combo: Vec<f64> = f
            .iter()
            .zip(&h)
            .map(|(a, b)| 2.5 * a - 1.25 * b)
            .collect();
        let s = FunctionalSample::from_rows(g, &[f, h, combo]).unwrap();
        let y = apply_transform(&s, TransformKind::LinearUnimodal).unwrap();
        assert_abs_diff_eq!(y[2], 2.5 * y[0] - 1.25 * y[1], epsilon = 1e-12);
    }

    #[test]
    fn add_noise_zero_ratio_is_identity() {
        let v = vec![1.0, 2.0, 3.0];
        let (out, sigma) = add_noise(&v, 0.0, 9).unwrap();
        assert_eq!(out, v);
        assert_eq!(sigma, 0.0);
    }

    #[test]
    fn add_noise_half_ratio_matches_variance() {
        let v: Vec<f64> = (0..1000).map(|i| (i as f64 * 0.37).sin()).collect();
        let m = v.len() as f64;
        let mean = v.iter().sum::<f64>() / m;
        let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (m - 1.0);
        let (_, sigma) = add_noise(&v, 0.5, 4).unwrap();
        assert_abs_diff_eq!(sigma * sigma, var, epsilon = 1e-12);
    }

    #[test]
    fn add_noise_realized_ratio() {
        // eta = 0.05 on a large sample: realized ratio within 0.005
        let g = Grid::uniform(0.0, 1.0, 11).unwrap();
        let s = gen_brownian_trend(&g, 100_000, 31).unwrap();
        let clean = apply_transform(&s, TransformKind::MinValue).unwrap();
        let (noisy, _) = add_noise(&clean, 0.05, 17).unwrap();
        let m = clean.len() as f64;
        let mean_c = clean.iter().sum::<f64>() / m;
        let var_c = clean.iter().map(|x| (x - mean_c) * (x - mean_c)).sum::<f64>() / (m - 1.0);
        let mean_n = noisy.iter().sum::<f64>() / m;
        let var_n = noisy.iter().map(|x| (x - mean_n) * (x - mean_n)).sum::<f64>() / (m - 1.0);
        let realized = (var_n - var_c) / var_n;
        assert!((realized - 0.05).abs() < 0.005, "realized ratio {realized}");
    }

    #[test]
    fn add_noise_rejects_bad_ratio_and_constant_values() {
        assert!(add_noise(&[1.0, 2.0], 1.0, 0).is_err());
        assert!(add_noise(&[1.0, 2.0], -0.1, 0).is_err());
        assert!(add_noise(&[3.0, 3.0, 3.0], 0.2, 0).is_err());
    }
}
