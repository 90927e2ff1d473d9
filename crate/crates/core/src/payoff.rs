//! Coalition payoffs: the test-set coefficient of determination obtained after
//! reconstructing every curve from the coalition's intervals, memoized by
//! coalition bitmask.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use dashmap::DashMap;

use crate::error::{Error, Result};
use crate::models::Predictor;
use crate::partition::{Coalition, Partition};
use crate::recon::{reconstruct, GaussianMoments, ReconstructionPlan};
use crate::sample::FunctionalSample;

/// Everything needed to score a coalition: the trained predictor, the fitted
/// Gaussian moments, the test sample with its targets, and the partition.
pub struct PayoffContext {
    predictor: Arc<dyn Predictor>,
    moments: GaussianMoments,
    sample: FunctionalSample,
    partition: Partition,
    targets: Vec<f64>,
    target_mean: f64,
    total_sum_squares: f64,
    /// Owning interval of each grid point, fixed once per context.
    point_intervals: Vec<usize>,
}

impl PayoffContext {
    pub fn new(
        predictor: Arc<dyn Predictor>,
        moments: GaussianMoments,
        sample: FunctionalSample,
        targets: Vec<f64>,
        partition: Partition,
    ) -> Result<Self> {
        if targets.len() != sample.num_curves() {
            return Err(Error::InvalidArgument(format!(
                "{} targets for {} curves",
                targets.len(),
                sample.num_curves()
            )));
        }
        if moments.dim() != sample.grid().len() {
            return Err(Error::InvalidArgument(format!(
                "moments dimension {} does not match the grid ({} points)",
                moments.dim(),
                sample.grid().len()
            )));
        }
        let point_intervals = partition.grid_interval_indices(sample.grid())?;
        let m = targets.len() as f64;
        let target_mean = targets.iter().sum::<f64>() / m;
        let total_sum_squares: f64 = targets
            .iter()
            .map(|y| (y - target_mean) * (y - target_mean))
            .sum();
        if total_sum_squares <= 0.0 {
            return Err(Error::InvalidArgument(
                "targets are constant; the payoff is undefined".into(),
            ));
        }
        Ok(Self {
            predictor,
            moments,
            sample,
            partition,
            targets,
            target_mean,
            total_sum_squares,
            point_intervals,
        })
    }

    pub fn n_intervals(&self) -> usize {
        self.partition.len()
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn sample(&self) -> &FunctionalSample {
        &self.sample
    }

    pub fn moments(&self) -> &GaussianMoments {
        &self.moments
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn target_mean(&self) -> f64 {
        self.target_mean
    }

    pub fn total_sum_squares(&self) -> f64 {
        self.total_sum_squares
    }

    pub fn predictor(&self) -> &Arc<dyn Predictor> {
        &self.predictor
    }

    /// Grid-point indices observed under the coalition.
    pub fn observed_indices(&self, coalition: Coalition) -> Vec<usize> {
        self.point_intervals
            .iter()
            .enumerate()
            .filter_map(|(h, &i)| coalition.contains(i).then_some(h))
            .collect()
    }

    /// `R~^2(S)`: reconstruct the test curves from the coalition's intervals,
    /// run the predictor on the completed curves, and score against the
    /// targets. May be negative; never clipped.
    pub fn rtilde_squared(&self, coalition: Coalition) -> Result<f64> {
        if coalition.n_players() != self.partition.len() {
            return Err(Error::InvalidArgument(format!(
                "coalition is over {} players but the partition has {} intervals",
                coalition.n_players(),
                self.partition.len()
            )));
        }
        let mask = coalition.mask();
        let wrap = |source: Error| Error::Evaluation {
            mask,
            source: Box::new(source),
        };
        let observed = self.observed_indices(coalition);
        let plan = ReconstructionPlan::new(&self.moments, &observed).map_err(wrap)?;
        let completed = reconstruct(&plan, &self.moments, &self.sample).map_err(wrap)?;
        let predictions = self.predictor.predict(&completed).map_err(wrap)?;
        if predictions.len() != self.targets.len() {
            return Err(wrap(Error::InvalidArgument(format!(
                "predictor returned {} values for {} targets",
                predictions.len(),
                self.targets.len()
            ))));
        }
        let sse: f64 = self
            .targets
            .iter()
            .zip(&predictions)
            .map(|(y, p)| (y - p) * (y - p))
            .sum();
        Ok(1.0 - sse / self.total_sum_squares)
    }

    /// The coalition game handed to the Shapley estimators: the empty
    /// coalition is worth exactly zero (the game-theoretic convention), every
    /// other coalition evaluates through the cache.
    pub fn game<'a>(
        &'a self,
        cache: &'a PayoffCache,
    ) -> impl Fn(Coalition) -> Result<f64> + Sync + 'a {
        move |coalition| {
            if coalition.is_empty() {
                Ok(0.0)
            } else {
                cached_payoff(cache, self, coalition)
            }
        }
    }

    /// Same game without memoization; every request recomputes.
    pub fn game_uncached(&self) -> impl Fn(Coalition) -> Result<f64> + Sync + '_ {
        move |coalition| {
            if coalition.is_empty() {
                Ok(0.0)
            } else {
                self.rtilde_squared(coalition)
            }
        }
    }
}

/// Concurrent memo table from coalition bitmask to payoff value.
///
/// Counters are scheduling-independent: `misses` counts first-time inserts
/// (distinct masks), `hits` is `requests - misses`. A capacity limit rejects
/// new entries once full; rejected values are simply recomputed on demand.
pub struct PayoffCache {
    entries: DashMap<u64, f64>,
    capacity: Option<usize>,
    requests: AtomicU64,
    misses: AtomicU64,
}

impl Default for PayoffCache {
    fn default() -> Self {
        Self::new()
    }
}

impl PayoffCache {
    /// Unbounded cache; at most `2^n` entries can ever exist for `n` players.
    pub fn new() -> Self {
        Self {
            entries: DashMap::new(),
            capacity: None,
            requests: AtomicU64::new(0),
            misses: AtomicU64::new(0),
        }
    }

    /// Cache holding at most `capacity` entries, rejecting insertions beyond it.
    pub fn with_capacity_limit(capacity: usize) -> Self {
        Self {
            entries: DashMap::new(),
            capacity: Some(capacity),
            requests: AtomicU64::new(0),
            misses: AtomicU64::new(0),
        }
    }

    /// Memoized lookup. Failed computations are never cached.
    pub fn get_or_compute(
        &self,
        mask: u64,
        compute: impl FnOnce() -> Result<f64>,
    ) -> Result<f64> {
        self.requests.fetch_add(1, Ordering::Relaxed);
        if let Some(v) = self.entries.get(&mask) {
            return Ok(*v);
        }
        let value = compute()?;
        if self.capacity.is_none_or(|cap| self.entries.len() < cap) {
            if let dashmap::Entry::Vacant(slot) = self.entries.entry(mask) {
                slot.insert(value);
                self.misses.fetch_add(1, Ordering::Relaxed);
            }
        }
        Ok(value)
    }

    pub fn requests(&self) -> u64 {
        self.requests.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> u64 {
        self.misses.load(Ordering::Relaxed)
    }

    pub fn hits(&self) -> u64 {
        self.requests() - self.misses()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Memoized payoff: look the coalition up, computing `R~^2` on a miss.
pub fn cached_payoff(
    cache: &PayoffCache,
    ctx: &PayoffContext,
    coalition: Coalition,
) -> Result<f64> {
    cache.get_or_compute(coalition.mask(), || ctx.rtilde_squared(coalition))
}
