//! Cubic B-spline basis with clamped uniform knots.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::grid::Grid;

const DEGREE: usize = 3;

/// Evaluate `basis_size` cubic B-splines on the grid (`T x K` matrix).
///
/// The knot vector is clamped at the grid endpoints with `basis_size - 4`
/// uniformly spaced interior knots, so `basis_size >= 4`.
pub fn bspline_basis(grid: &Grid, basis_size: usize) -> Result<DMatrix<f64>> {
    if basis_size < DEGREE + 1 {
        return Err(Error::InvalidArgument(format!(
            "a cubic B-spline basis needs at least {} functions, got {basis_size}",
            DEGREE + 1
        )));
    }
    let (lo, hi) = (grid.lo(), grid.hi());
    let interior = basis_size - DEGREE - 1;
    let mut knots = Vec::with_capacity(basis_size + DEGREE + 1);
    knots.extend(std::iter::repeat_n(lo, DEGREE + 1));
    for i in 1..=interior {
        knots.push(lo + (hi - lo) * (i as f64) / ((interior + 1) as f64));
    }
    knots.extend(std::iter::repeat_n(hi, DEGREE + 1));

    let mut basis = DMatrix::zeros(grid.len(), basis_size);
    for (row, &t) in grid.points().iter().enumerate() {
        let span = find_span(&knots, basis_size, t);
        let values = basis_functions(&knots, span, t);
        for (offset, &v) in values.iter().enumerate() {
            basis[(row, span - DEGREE + offset)] = v;
        }
    }
    Ok(basis)
}

/// Knot span index: the largest `i` with `knots[i] <= t < knots[i+1]`, clamped
/// to the last non-degenerate span at the right endpoint.
fn find_span(knots: &[f64], basis_size: usize, t: f64) -> usize {
    if t >= knots[basis_size] {
        return basis_size - 1;
    }
    if t <= knots[DEGREE] {
        return DEGREE;
    }
    let mut lo = DEGREE;
    let mut hi = basis_size;
    let mut mid = (lo + hi) / 2;
    while t < knots[mid] || t >= knots[mid + 1] {
        if t < knots[mid] {
            hi = mid;
        } else {
            lo = mid;
        }
        mid = (lo + hi) / 2;
    }
    mid
}

/// Cox-de Boor recursion for the `DEGREE + 1` non-zero basis values at `t`.
fn basis_functions(knots: &[f64], span: usize, t: f64) -> [f64; DEGREE + 1] {
    let mut values = [0.0f64; DEGREE + 1];
    let mut left = [0.0f64; DEGREE + 1];
    let mut right = [0.0f64; DEGREE + 1];
    values[0] = 1.0;
    for j in 1..=DEGREE {
        left[j] = t - knots[span + 1 - j];
        right[j] = knots[span + j] - t;
        let mut saved = 0.0;
        for r in 0..j {
            let denom = right[r + 1] + left[j - r];
            let temp = if denom == 0.0 { 0.0 } else { values[r] / denom };
            values[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        values[j] = saved;
    }
    values
}
