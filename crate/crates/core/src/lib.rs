//! Shapley-value relevance functions for scalar-on-function prediction models.
//!
//! Given a trained predictor `f` mapping curves to scalars and a test set of
//! curves with targets, the relevance of an interval of the curve domain is
//! its Shapley value in the coalition game whose payoff is the test-set R^2
//! obtained when curve values outside the coalition are replaced by their
//! Gaussian conditional expectations given the values inside. The per-interval
//! values divide by interval width into a histogram-type relevance function
//! over the domain.
//!
//! The pipeline:
//! 1. estimate Gaussian moments from the test sample ([`recon`]),
//! 2. score coalitions through the predictor with memoization ([`payoff`]),
//! 3. estimate per-interval Shapley values by permutation sampling
//!    ([`shapley`]),
//! 4. report the relevance function ([`relevance`]).
//!
//! [`models`] ships functional linear and k-nearest-neighbour predictors plus
//! oracle and constant baselines; [`datagen`] generates the synthetic
//! processes and target transformations used by the simulation study.

pub use nalgebra;

pub mod datagen;
pub mod error;
pub mod grid;
pub mod io;
pub mod models;
pub mod partition;
pub mod payoff;
pub mod recon;
pub mod relevance;
pub mod sample;
pub mod shapley;

pub use error::{Error, Result};
pub use grid::{l2_distance, trapezoid_quadrature, Grid};
pub use partition::{coalition_grid_indices, Coalition, Partition};
pub use payoff::{cached_payoff, PayoffCache, PayoffContext};
pub use recon::{
    pseudo_inverse_psd, reconstruct, reconstruct_fpca_form, GaussianMoments, ReconstructionPlan,
};
pub use relevance::{relevance_histogram, relevance_polygonal, RelevanceFunction};
pub use sample::FunctionalSample;
pub use shapley::{
    sample_permutations, shapley_exact, shapley_monte_carlo, PermutationBatch, ShapleyResult,
};
