//! Crate-wide error type.

use thiserror::Error;

/// Errors produced anywhere in the simulation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates a type invariant or an operation precondition.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    /// A quadrature or linear solve failed to reach its tolerance.
    #[error("numerical failure in {context}: requested tolerance {requested:e}, achieved {achieved:e}")]
    NumericalFailure {
        context: &'static str,
        requested: f64,
        achieved: f64,
    },

    /// A quantity that must be non-negative by construction came out
    /// significantly negative, signalling a convention or quadrature bug.
    #[error("model violation in {context}: {detail}")]
    ModelViolation { context: &'static str, detail: String },

    /// Two operators or states live on different Hilbert spaces.
    #[error("space mismatch: {left} vs {right} (dim {left_dim} vs {right_dim})")]
    SpaceMismatch {
        left: &'static str,
        right: &'static str,
        left_dim: usize,
        right_dim: usize,
    },

    /// The Liouvillian has more than one steady state.
    #[error("degenerate steady state: the trace-constrained system is singular beyond the expected null vector")]
    DegenerateSteadyState,

    /// A solved density matrix is not positive within tolerance.
    #[error("unphysical state: minimum eigenvalue {min_eigenvalue:e} below -{tolerance:e}")]
    Physicality { min_eigenvalue: f64, tolerance: f64 },

    /// Fixed-step propagation lost the trace.
    #[error("step instability in evolve: trace drift {drift:e} exceeds {limit:e}; reduce dt")]
    StepInstability { drift: f64, limit: f64 },

    /// Fock-truncation doubling exceeded the hard cap.
    #[error("truncation convergence failed: N exceeded cap {cap} (last variance change {last_change:e})")]
    TruncationOverflow { cap: usize, last_change: f64 },

    /// Squeezing-in-dB conversion outside its domain.
    #[error("variance {variance} is outside the dB-conversion domain (-0.25, inf)")]
    DbDomain { variance: f64 },

    /// Malformed configuration input.
    #[error("config error: {0}")]
    Config(String),

    /// Every grid point of a sweep failed.
    #[error("sweep failed: all {rows} grid points errored; first error: {first}")]
    SweepAllFailed { rows: usize, first: String },

    /// Unknown figure preset id.
    #[error("unknown figure id `{0}` (expected fig1, fig2, fig3a, fig3b, fig4a, fig4b, fig5a, fig5b)")]
    UnknownFigure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
