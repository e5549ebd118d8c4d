//! Error types shared by all engines.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CoreError>;

#[derive(Debug, Clone, Error)]
pub enum CoreError {
    /// Inputs violate an operation precondition (dimension mismatch, bad
    /// parameter, chart mismatch between paired runs, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A basis family whose Gram matrix is singular or too ill-conditioned
    /// to invert within the configured condition-number bound.
    #[error("degenerate basis: {0}")]
    DegenerateBasis(String),

    /// A metric that must be invertible (or positive-definite) is not.
    #[error("degenerate metric: {0}")]
    DegenerateMetric(String),

    /// A grid is too small for the requested stencil, or the node is inside
    /// a stencil margin that the operation cannot use.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// A path leaves the chart or has the wrong shape for the operation.
    #[error("invalid path: {0}")]
    InvalidPath(String),

    /// Conditioning on a reference state with zero amplitude at an entangled
    /// index: the relative amplitude C/a diverges and has no defined value.
    #[error("undefined conditional: {0}")]
    UndefinedConditional(String),

    /// An integrator step was refused (positivity loss); the payload is a
    /// suggested smaller step.
    #[error("step rejected: {reason}; suggested step {suggested_step}")]
    StepRejected { reason: String, suggested_step: f64 },

    /// No eigenvalue of the total constraint operator lies within the zero
    /// window.
    #[error("no zero mode: {0}")]
    NoZeroMode(String),
}

impl CoreError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        CoreError::InvalidInput(msg.into())
    }
}
