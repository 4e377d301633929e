use thiserror::Error;

/// Errors produced by the solver and its supporting operations.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation
    /// (negative argument to Φ, exponent p ≤ 1, empty grid, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Structurally inconsistent inputs, e.g. a step function whose value
    /// count does not match the cell count of the grid it is paired with.
    #[error("shape error: {0}")]
    Shape(String),

    /// An iterative routine exhausted its iteration budget. Carries the
    /// final bracket so the caller can diagnose the failure.
    #[error("no convergence after {iters} iterations ({context}, bracket [{lo}, {hi}])")]
    NoConvergence {
        context: &'static str,
        iters: usize,
        lo: f64,
        hi: f64,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
