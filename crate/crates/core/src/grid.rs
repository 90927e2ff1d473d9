//! Observation grids and trapezoid quadrature.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Strictly increasing observation points `t_1 < ... < t_T` shared by every curve.
///
/// Grids are immutable and cheap to clone. Spacing may be non-uniform; every
/// integral in the crate is a trapezoid rule over these points.
#[derive(Debug, Clone)]
pub struct Grid {
    points: Arc<[f64]>,
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.points() == other.points()
    }
}

impl Grid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "a grid needs at least two points, got {}",
                points.len()
            )));
        }
        for (i, &p) in points.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "grid point {i} is not finite: {p}"
                )));
            }
            if i > 0 && points[i - 1] >= p {
                return Err(Error::InvalidArgument(format!(
                    "grid points must be strictly increasing, violated at index {i}: {} >= {p}",
                    points[i - 1]
                )));
            }
        }
        Ok(Self {
            points: points.into(),
        })
    }

    /// `len` equispaced points from `lo` to `hi` inclusive.
    pub fn uniform(lo: f64, hi: f64, len: usize) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::InvalidArgument(format!(
                "degenerate grid range [{lo}, {hi}]"
            )));
        }
        if len < 2 {
            return Err(Error::InvalidArgument(format!(
                "a grid needs at least two points, got {len}"
            )));
        }
        let span = hi - lo;
        let denom = (len - 1) as f64;
        let points = (0..len)
            .map(|i| {
                if i == len - 1 {
                    hi
                } else {
                    lo + span * (i as f64) / denom
                }
            })
            .collect();
        Self::new(points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn lo(&self) -> f64 {
        self.points[0]
    }

    pub fn hi(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Trapezoid weights `w` so that `sum_h w_h f(t_h)` integrates `f` over the grid.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let t = self.points();
        let mut w = vec![0.0; t.len()];
        for k in 0..t.len() - 1 {
            let half = (t[k + 1] - t[k]) / 2.0;
            w[k] += half;
            w[k + 1] += half;
        }
        w
    }

    /// Index of the grid point closest to `t`; ties resolve to the lower index.
    pub fn nearest_index(&self, t: f64) -> usize {
        let pts = self.points();
        let mut best = 0;
        let mut best_dist = (pts[0] - t).abs();
        for (i, &p) in pts.iter().enumerate().skip(1) {
            let d = (p - t).abs();
            if d < best_dist {
                best = i;
                best_dist = d;
            }
        }
        best
    }

    /// Whether the grid mirrors onto itself about its midpoint, so that index
    /// `h` reflects to index `T-1-h`.
    pub fn is_symmetric(&self) -> bool {
        let pts = self.points();
        let sum = self.lo() + self.hi();
        let tol = 1e-9 * (self.hi() - self.lo());
        pts.iter()
            .zip(pts.iter().rev())
            .all(|(&a, &b)| (sum - a - b).abs() <= tol)
    }
}

/// Trapezoid rule over the grid: `sum_k (f(t_k) + f(t_{k+1}))/2 * (t_{k+1} - t_k)`.
pub fn trapezoid_quadrature(grid: &Grid, values: &[f64]) -> Result<f64> {
    if values.len() != grid.len() {
        return Err(Error::InvalidArgument(format!(
            "integrand length {} does not match grid length {}",
            values.len(),
            grid.len()
        )));
    }
    let t = grid.points();
    let mut acc = 0.0;
    for k in 0..t.len() - 1 {
        acc += (values[k] + values[k + 1]) / 2.0 * (t[k + 1] - t[k]);
    }
    Ok(acc)
}

/// L2 distance between two functions on the grid: `sqrt(integral (f-g)^2)`.
pub fn l2_distance(grid: &Grid, f: &[f64], g: &[f64]) -> Result<f64> {
    if f.len() != grid.len() || g.len() != grid.len() {
        return Err(Error::InvalidArgument(format!(
            "function lengths {}/{} do not match grid length {}",
            f.len(),
            g.len(),
            grid.len()
        )));
    }
    let t = grid.points();
    let mut acc = 0.0;
    for k in 0..t.len() - 1 {
        let a = f[k] - g[k];
        let b = f[k + 1] - g[k + 1];
        acc += (a * a + b * b) / 2.0 * (t[k + 1] - t[k]);
    }
    Ok(acc.max(0.0).sqrt())
}
