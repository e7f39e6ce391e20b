//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by channel construction, detectors, and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Dimensions are zero, inconsistent, or otherwise unusable.
    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    /// An exhaustive or combinatorial routine was asked to exceed its cap.
    #[error("{what} requires {needed} candidates, exceeding the cap of {cap}")]
    BudgetExceeded {
        what: String,
        needed: u128,
        cap: u128,
    },

    /// An iterative solver failed to converge within its iteration budget.
    #[error("{what} did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence {
        what: String,
        iterations: usize,
        residual: f64,
    },

    /// A configuration value is out of its documented range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Underlying I/O failure while reading or writing channel files.
    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// A channel file is malformed or inconsistent with its header.
    #[error("malformed channel file: {0}")]
    MalformedFile(String),
}

/// Convenient result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
