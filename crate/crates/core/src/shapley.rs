//! Shapley value estimation by exact permutation enumeration or Monte-Carlo
//! permutation sampling over an arbitrary coalition game.
//!
//! Both estimators walk each permutation left to right, so one marginal
//! contribution costs one new payoff request and the per-permutation marginals
//! telescope to `v(N) - v(empty)` exactly. Callers supply memoization by
//! composing the payoff callable with a [`crate::payoff::PayoffCache`]; the
//! walkers themselves request every prefix, including the empty one.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::partition::Coalition;

/// Exact enumeration is capped at this many players (`8! = 40320` walks).
pub const EXACT_PLAYER_LIMIT: usize = 8;

/// A seeded batch of independent uniform permutations of `{0, .., n-1}`,
/// drawn with replacement via Fisher-Yates shuffles.
#[derive(Debug, Clone)]
pub struct PermutationBatch {
    n: usize,
    perms: Vec<Vec<usize>>,
    seed: u64,
}

/// Draw `count` permutations of `n` players from a deterministic generator.
pub fn sample_permutations(n: usize, count: usize, seed: u64) -> Result<PermutationBatch> {
    if n == 0 || count == 0 {
        return Err(Error::InvalidArgument(format!(
            "need at least one player and one permutation, got n={n}, count={count}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perms = Vec::with_capacity(count);
    for _ in 0..count {
        let mut p: Vec<usize> = (0..n).collect();
        p.shuffle(&mut rng);
        perms.push(p);
    }
    Ok(PermutationBatch { n, perms, seed })
}

impl PermutationBatch {
    /// Wrap explicit permutations (each must be a bijection on `0..n`).
    pub fn from_permutations(n: usize, perms: Vec<Vec<usize>>, seed: u64) -> Result<Self> {
        if n == 0 || perms.is_empty() {
            return Err(Error::InvalidArgument(
                "need at least one player and one permutation".into(),
            ));
        }
        for (i, p) in perms.iter().enumerate() {
            let mut seen = vec![false; n];
            if p.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "permutation {i} has length {}, expected {n}",
                    p.len()
                )));
            }
            for &v in p {
                if v >= n || seen[v] {
                    return Err(Error::InvalidArgument(format!(
                        "permutation {i} is not a bijection on 0..{n}"
                    )));
                }
                seen[v] = true;
            }
        }
        Ok(Self { n, perms, seed })
    }

    pub fn n_players(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perms.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn permutations(&self) -> &[Vec<usize>] {
        &self.perms
    }
}

/// Per-player Shapley estimates plus the payoffs anchoring the telescoping
/// identity `sum phi = v(N) - v(empty)`.
#[derive(Debug, Clone)]
pub struct ShapleyResult {
    phi: Vec<f64>,
    permutations_used: usize,
    payoff_full: f64,
    payoff_empty: f64,
    std_errors: Option<Vec<f64>>,
}

impl ShapleyResult {
    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn n_players(&self) -> usize {
        self.phi.len()
    }

    pub fn permutations_used(&self) -> usize {
        self.permutations_used
    }

    /// `v(N)`, the payoff of the full coalition.
    pub fn payoff_full(&self) -> f64 {
        self.payoff_full
    }

    /// `v(empty)`, the payoff the walks started from.
    pub fn payoff_empty(&self) -> f64 {
        self.payoff_empty
    }

    /// Per-player standard errors; present in Monte-Carlo mode only.
    pub fn std_errors(&self) -> Option<&[f64]> {
        self.std_errors.as_deref()
    }

    /// `|sum phi - (v(N) - v(empty))|`.
    pub fn efficiency_gap(&self) -> f64 {
        let total: f64 = self.phi.iter().sum();
        (total - (self.payoff_full - self.payoff_empty)).abs()
    }
}

/// Walk one permutation: request the empty prefix, then add one player at a
/// time; returns the marginal contribution of every player plus the first and
/// last payoff.
fn walk_permutation<F>(payoff: &F, n: usize, perm: &[usize]) -> Result<(Vec<f64>, f64, f64)>
where
    F: Fn(Coalition) -> Result<f64>,
{
    let mut coalition = Coalition::empty(n);
    let empty = payoff(coalition)?;
    let mut prev = empty;
    let mut marginals = vec![0.0; n];
    for &player in perm {
        coalition = coalition.with(player);
        let current = payoff(coalition)?;
        marginals[player] = current - prev;
        prev = current;
    }
    Ok((marginals, empty, prev))
}

/// Advance to the next lexicographic permutation; false once exhausted.
fn next_permutation(perm: &mut [usize]) -> bool {
    if perm.len() < 2 {
        return false;
    }
    let mut i = perm.len() - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = perm.len() - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// Average marginal contributions over all `n!` permutations.
///
/// Every prefix is requested through the payoff callable; with a memoizing
/// callable at most `2^n` distinct evaluations occur. Refused for `n > 8`.
pub fn shapley_exact<F>(payoff: F, n: usize) -> Result<ShapleyResult>
where
    F: Fn(Coalition) -> Result<f64>,
{
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one player".into()));
    }
    if n > EXACT_PLAYER_LIMIT {
        return Err(Error::ExactTooLarge {
            n,
            limit: EXACT_PLAYER_LIMIT,
        });
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sums = vec![0.0; n];
    let mut count = 0usize;
    let mut payoff_empty = 0.0;
    let mut payoff_full = 0.0;
    loop {
        let (marginals, empty, full) = walk_permutation(&payoff, n, &perm)
            .map_err(|e| Error::PermutationEvaluation {
                permutation: count,
                source: Box::new(e),
            })?;
        if count == 0 {
            payoff_empty = empty;
            payoff_full = full;
        }
        for (s, m) in sums.iter_mut().zip(&marginals) {
            *s += m;
        }
        count += 1;
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let phi = sums.iter().map(|s| s / count as f64).collect();
    Ok(ShapleyResult {
        phi,
        permutations_used: count,
        payoff_full,
        payoff_empty,
        std_errors: None,
    })
}

/// Monte-Carlo estimate over a sampled permutation batch.
///
/// Permutations may be evaluated in parallel; the marginal vectors are reduced
/// in batch order afterwards, so the result is bitwise independent of
/// scheduling. Standard errors are `sample std / sqrt(k)` per player.
pub fn shapley_monte_carlo<F>(payoff: F, batch: &PermutationBatch) -> Result<ShapleyResult>
where
    F: Fn(Coalition) -> Result<f64> + Sync,
{
    let n = batch.n_players();
    let k = batch.len();
    let walks: Vec<(Vec<f64>, f64, f64)> = batch
        .permutations()
        .par_iter()
        .enumerate()
        .map(|(index, perm)| {
            walk_permutation(&payoff, n, perm).map_err(|e| Error::PermutationEvaluation {
                permutation: index,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;

    let mut phi = vec![0.0; n];
    for (marginals, _, _) in &walks {
        for (p, m) in phi.iter_mut().zip(marginals) {
            *p += m;
        }
    }
    for p in phi.iter_mut() {
        *p /= k as f64;
    }

    let std_errors = if k > 1 {
        let mut se = vec![0.0; n];
        for (marginals, _, _) in &walks {
            for (s, (m, p)) in se.iter_mut().zip(marginals.iter().zip(&phi)) {
                let d = m - p;
                *s += d * d;
            }
        }
        se.iter_mut()
            .for_each(|s| *s = (*s / (k as f64 - 1.0)).sqrt() / (k as f64).sqrt());
        Some(se)
    } else {
        Some(vec![0.0; n])
    };

    Ok(ShapleyResult {
        phi,
        permutations_used: k,
        payoff_full: walks[0].2,
        payoff_empty: walks[0].1,
        std_errors,
    })
}
