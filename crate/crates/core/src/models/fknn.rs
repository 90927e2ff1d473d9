//! Functional k-nearest-neighbour regression under the trapezoid L2 metric.

use crate::error::{Error, Result};
use crate::models::Predictor;
use crate::sample::FunctionalSample;

/// k-NN regressor over curves: the prediction is the unweighted mean of the
/// targets of the `k` training curves nearest in L2 distance; equal distances
/// break toward the lower training-row index.
#[derive(Debug, Clone)]
pub struct FunctionalKnn {
    neighbors: usize,
    train: FunctionalSample,
    targets: Vec<f64>,
    quad_weights: Vec<f64>,
}

pub fn fit_fknn(
    train: &FunctionalSample,
    targets: &[f64],
    neighbors: usize,
) -> Result<FunctionalKnn> {
    let m = train.num_curves();
    if targets.len() != m {
        return Err(Error::InvalidArgument(format!(
            "{} targets for {m} curves",
            targets.len()
        )));
    }
    if neighbors == 0 || neighbors > m {
        return Err(Error::InvalidArgument(format!(
            "neighbour count must lie in 1..={m}, got {neighbors}"
        )));
    }
    Ok(FunctionalKnn {
        neighbors,
        train: train.clone(),
        targets: targets.to_vec(),
        quad_weights: train.grid().trapezoid_weights(),
    })
}

impl FunctionalKnn {
    pub fn neighbors(&self) -> usize {
        self.neighbors
    }
}

impl Predictor for FunctionalKnn {
    fn predict(&self, sample: &FunctionalSample) -> Result<Vec<f64>> {
        if !sample.same_grid(&self.train) {
            return Err(Error::InvalidArgument(
                "sample grid does not match the grid the k-NN model was fitted on".into(),
            ));
        }
        let t = sample.grid().len();
        let m_train = self.train.num_curves();
        let q = sample.values();
        let r = self.train.values();
        let w = &self.quad_weights;

        let mut out = Vec::with_capacity(sample.num_curves());
        let mut dist = vec![(0.0f64, 0usize); m_train];
        for j in 0..sample.num_curves() {
            for (i, slot) in dist.iter_mut().enumerate() {
                let mut acc = 0.0;
                for h in 0..t {
                    let d = q[(j, h)] - r[(i, h)];
                    acc += w[h] * d * d;
                }
                *slot = (acc, i);
            }
            dist.sort_unstable_by(|a, b| {
                a.0.partial_cmp(&b.0)
                    .expect("finite distances")
                    .then(a.1.cmp(&b.1))
            });
            let mean = dist[..self.neighbors]
                .iter()
                .map(|&(_, i)| self.targets[i])
                .sum::<f64>()
                / self.neighbors as f64;
            out.push(mean);
        }
        Ok(out)
    }

    fn name(&self) -> &'static str {
        "fknn"
    }
}
