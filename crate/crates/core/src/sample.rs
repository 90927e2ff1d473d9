//! Functional samples: a set of curves observed on a shared grid.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// `m` curves observed on a shared grid of `T` points; row `j` holds curve `j`.
///
/// Every entry is finite. Partial observation is expressed through index sets,
/// never through holes in the matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalSample {
    grid: Grid,
    values: DMatrix<f64>,
}

impl FunctionalSample {
    pub fn new(grid: Grid, values: DMatrix<f64>) -> Result<Self> {
        if values.ncols() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "curve matrix has {} columns but the grid has {} points",
                values.ncols(),
                grid.len()
            )));
        }
        if values.nrows() == 0 {
            return Err(Error::InvalidArgument(
                "a functional sample needs at least one curve".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "curve matrix contains non-finite entries".into(),
            ));
        }
        Ok(Self { grid, values })
    }

    pub fn from_rows(grid: Grid, rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidArgument(
                "a functional sample needs at least one curve".into(),
            ));
        }
        let t = grid.len();
        for (j, row) in rows.iter().enumerate() {
            if row.len() != t {
                return Err(Error::InvalidArgument(format!(
                    "curve {j} has {} values but the grid has {t} points",
                    row.len()
                )));
            }
        }
        let values = DMatrix::from_fn(rows.len(), t, |r, c| rows[r][c]);
        Self::new(grid, values)
    }

    pub fn num_curves(&self) -> usize {
        self.values.nrows()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    /// Copy of curve `j` as a contiguous vector.
    pub fn curve(&self, j: usize) -> Vec<f64> {
        self.values.row(j).iter().copied().collect()
    }

    pub fn same_grid(&self, other: &FunctionalSample) -> bool {
        self.grid == other.grid
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_shape_and_finiteness() {
        let grid = Grid::uniform(0.0, 1.0, 3).unwrap();
        assert!(FunctionalSample::new(grid.clone(), DMatrix::zeros(2, 2)).is_err());
        assert!(FunctionalSample::new(grid.clone(), DMatrix::zeros(0, 3)).is_err());
        let mut bad = DMatrix::zeros(1, 3);
        bad[(0, 1)] = f64::INFINITY;
        assert!(FunctionalSample::new(grid.clone(), bad).is_err());
        assert!(FunctionalSample::new(grid, DMatrix::zeros(2, 3)).is_ok());
    }

    #[test]
    fn from_rows_round_trips() {
        let grid = Grid::uniform(0.0, 1.0, 3).unwrap();
        let s = FunctionalSample::from_rows(grid, &[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]])
            .unwrap();
        assert_eq!(s.num_curves(), 2);
        assert_eq!(s.curve(1), vec![4.0, 5.0, 6.0]);
    }
}
