//! Interval partitions of the curve domain and bitmask coalitions over them.

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Consecutive intervals `I_1 .. I_n` covering `[a, b]`.
///
/// Every interval is half-open `[a_i, b_i)` except the last, which is closed.
/// A grid point on a shared cut therefore belongs to exactly one interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    cuts: Vec<f64>,
}

impl Partition {
    /// Bitmask coalitions cap the number of intervals.
    pub const MAX_INTERVALS: usize = 64;

    pub fn from_cuts(cuts: Vec<f64>) -> Result<Self> {
        if cuts.len() < 2 {
            return Err(Error::InvalidArgument(
                "a partition needs at least two cut points".into(),
            ));
        }
        let n = cuts.len() - 1;
        if n > Self::MAX_INTERVALS {
            return Err(Error::UnsupportedPartitionSize {
                n,
                limit: Self::MAX_INTERVALS,
            });
        }
        for (i, &c) in cuts.iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::InvalidArgument(format!("cut {i} is not finite")));
            }
            if i > 0 && cuts[i - 1] >= c {
                return Err(Error::InvalidArgument(format!(
                    "cuts must be strictly increasing, violated at index {i}"
                )));
            }
        }
        Ok(Self { cuts })
    }

    /// `n` equal-width intervals over `domain`, cuts at `a + i (b - a) / n`.
    pub fn equal(domain: (f64, f64), n: usize) -> Result<Self> {
        let (a, b) = domain;
        if n == 0 {
            return Err(Error::InvalidArgument(
                "a partition needs at least one interval".into(),
            ));
        }
        if !a.is_finite() || !b.is_finite() || a >= b {
            return Err(Error::InvalidArgument(format!(
                "degenerate domain [{a}, {b}]"
            )));
        }
        if n > Self::MAX_INTERVALS {
            return Err(Error::UnsupportedPartitionSize {
                n,
                limit: Self::MAX_INTERVALS,
            });
        }
        let span = b - a;
        let cuts = (0..=n)
            .map(|i| {
                if i == n {
                    b
                } else {
                    a + span * (i as f64) / (n as f64)
                }
            })
            .collect();
        Self::from_cuts(cuts)
    }

    /// Number of intervals.
    pub fn len(&self) -> usize {
        self.cuts.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cuts(&self) -> &[f64] {
        &self.cuts
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.cuts[0], self.cuts[self.cuts.len() - 1])
    }

    pub fn interval(&self, i: usize) -> (f64, f64) {
        (self.cuts[i], self.cuts[i + 1])
    }

    pub fn width(&self, i: usize) -> f64 {
        self.cuts[i + 1] - self.cuts[i]
    }

    pub fn midpoint(&self, i: usize) -> f64 {
        (self.cuts[i] + self.cuts[i + 1]) / 2.0
    }

    /// Interval owning `t` under the half-open rule, or `None` outside the
    /// domain. Points within `1e-12 * max(1, span)` of an endpoint count as
    /// inside.
    pub fn interval_of(&self, t: f64) -> Option<usize> {
        let (a, b) = self.domain();
        let eps = 1e-12 * (b - a).max(1.0);
        if t < a - eps || t > b + eps {
            return None;
        }
        let tc = t.clamp(a, b);
        let i = match self
            .cuts
            .binary_search_by(|c| c.partial_cmp(&tc).expect("finite cuts"))
        {
            Ok(j) => j,
            Err(j) => j - 1,
        };
        Some(i.min(self.len() - 1))
    }

    /// Interval index for every grid point; errors if any point falls outside
    /// the domain.
    pub fn grid_interval_indices(&self, grid: &Grid) -> Result<Vec<usize>> {
        let (lo, hi) = self.domain();
        grid.points()
            .iter()
            .enumerate()
            .map(|(index, &value)| {
                self.interval_of(value).ok_or(Error::DomainMismatch {
                    value,
                    index,
                    lo,
                    hi,
                })
            })
            .collect()
    }
}

/// A subset of partition intervals, encoded as a bitmask over at most 64 players.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Coalition {
    mask: u64,
    n: u8,
}

impl Coalition {
    pub fn new(mask: u64, n: usize) -> Result<Self> {
        if n == 0 || n > Partition::MAX_INTERVALS {
            return Err(Error::UnsupportedPartitionSize {
                n,
                limit: Partition::MAX_INTERVALS,
            });
        }
        if n < 64 && (mask >> n) != 0 {
            return Err(Error::InvalidArgument(format!(
                "coalition mask {mask:#x} has bits beyond player count {n}"
            )));
        }
        Ok(Self { mask, n: n as u8 })
    }

    pub fn empty(n: usize) -> Self {
        Self::new(0, n).expect("player count in range")
    }

    pub fn full(n: usize) -> Self {
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        Self { mask, n: n as u8 }
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn n_players(&self) -> usize {
        self.n as usize
    }

    pub fn contains(&self, player: usize) -> bool {
        player < self.n_players() && (self.mask >> player) & 1 == 1
    }

    /// The coalition with `player` added.
    pub fn with(&self, player: usize) -> Self {
        debug_assert!(player < self.n_players());
        Self {
            mask: self.mask | (1 << player),
            n: self.n,
        }
    }

    pub fn complement(&self) -> Self {
        Self {
            mask: Self::full(self.n_players()).mask & !self.mask,
            n: self.n,
        }
    }

    pub fn count(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn is_full(&self) -> bool {
        self.mask == Self::full(self.n_players()).mask
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_players()).filter(|&i| self.contains(i))
    }
}

/// Indices of grid points lying in the union of the coalition's intervals.
///
/// The complement of the result against `0..T` is exactly the index set of the
/// complementary coalition.
pub fn coalition_grid_indices(
    partition: &Partition,
    coalition: &Coalition,
    grid: &Grid,
) -> Result<Vec<usize>> {
    if coalition.n_players() != partition.len() {
        return Err(Error::InvalidArgument(format!(
            "coalition is over {} players but the partition has {} intervals",
            coalition.n_players(),
            partition.len()
        )));
    }
    let owners = partition.grid_interval_indices(grid)?;
    Ok(owners
        .into_iter()
        .enumerate()
        .filter_map(|(h, i)| coalition.contains(i).then_some(h))
        .collect())
}
