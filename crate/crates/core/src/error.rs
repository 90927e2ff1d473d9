use std::path::PathBuf;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("partitions are limited to {limit} intervals in the bitmask representation, got {n}")]
    UnsupportedPartitionSize { n: usize, limit: usize },

    #[error("grid point {value} (index {index}) lies outside the partition domain [{lo}, {hi}]")]
    DomainMismatch {
        value: f64,
        index: usize,
        lo: f64,
        hi: f64,
    },

    #[error("insufficient sample: need at least {need} curves, got {got}")]
    InsufficientSample { need: usize, got: usize },

    #[error("matrix is not symmetric: max |A - A^T| = {deviation:e} exceeds {tolerance:e}")]
    NotSymmetric { deviation: f64, tolerance: f64 },

    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:e} lies below -{tolerance:e}")]
    NotPsd { eigenvalue: f64, tolerance: f64 },

    #[error("payoff evaluation failed for coalition mask {mask:#x}")]
    Evaluation {
        mask: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("payoff evaluation failed at permutation {permutation}")]
    PermutationEvaluation {
        permutation: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("exact enumeration supports at most {limit} players, got {n}; use Monte Carlo sampling")]
    ExactTooLarge { n: usize, limit: usize },

    #[error("model fit failed: {0}")]
    Fit(String),

    #[error("hyperparameter selection failed: {0}")]
    Selection(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
