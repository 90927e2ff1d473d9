//! Relevance functions derived from per-interval Shapley values.

use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::shapley::ShapleyResult;

/// The histogram-type relevance function: a step of height `phi_i / width_i`
/// over each interval, so the step integrates back to `phi_i`. The polygonal
/// form lists one vertex per step midpoint plus the two boundary values.
#[derive(Debug, Clone)]
pub struct RelevanceFunction {
    partition: Partition,
    phi: Vec<f64>,
    heights: Vec<f64>,
    vertices: Vec<(f64, f64)>,
}

impl RelevanceFunction {
    /// Build the step form from raw per-interval values.
    pub fn from_phi(partition: Partition, phi: Vec<f64>) -> Result<Self> {
        if phi.len() != partition.len() {
            return Err(Error::InvalidArgument(format!(
                "{} Shapley values for {} intervals",
                phi.len(),
                partition.len()
            )));
        }
        let heights = phi
            .iter()
            .enumerate()
            .map(|(i, v)| v / partition.width(i))
            .collect();
        Ok(Self {
            partition,
            phi,
            heights,
            vertices: Vec::new(),
        })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    /// Polygonal vertices; empty until [`relevance_polygonal`] fills them.
    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    /// Integral of the step function over the domain: exactly `sum phi`.
    pub fn integral(&self) -> f64 {
        self.heights
            .iter()
            .enumerate()
            .map(|(i, h)| h * self.partition.width(i))
            .sum()
    }

    /// Step-function value at `t`, `None` outside the domain.
    pub fn value_at(&self, t: f64) -> Option<f64> {
        self.partition.interval_of(t).map(|i| self.heights[i])
    }
}

/// The histogram-type relevance function of a Shapley result.
pub fn relevance_histogram(
    partition: &Partition,
    result: &ShapleyResult,
) -> Result<RelevanceFunction> {
    RelevanceFunction::from_phi(partition.clone(), result.phi().to_vec())
}

/// Fill the polygonal form: vertices `(a, h_1)`, `(mid_i, h_i)` for every
/// interval, and `(b, h_n)`.
pub fn relevance_polygonal(rf: &RelevanceFunction) -> RelevanceFunction {
    let n = rf.partition.len();
    let (a, b) = rf.partition.domain();
    let mut vertices = Vec::with_capacity(n + 2);
    vertices.push((a, rf.heights[0]));
    for i in 0..n {
        vertices.push((rf.partition.midpoint(i), rf.heights[i]));
    }
    vertices.push((b, rf.heights[n - 1]));
    RelevanceFunction {
        partition: rf.partition.clone(),
        phi: rf.phi.clone(),
        heights: rf.heights.clone(),
        vertices,
    }
}
