use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum CorrError {
    /// Shapes, block structures or owning algebras do not line up.
    #[error("structural mismatch: {0}")]
    Structural(String),

    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A stated precondition does not hold for the given data.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An iterative solver stopped without reaching its tolerance.
    #[error("solver did not reach tolerance; achieved residual {residual:.3e}")]
    Solver { residual: f64 },

    /// A state or family that must be faithful is not.
    #[error("not faithful: {0}")]
    NotFaithful(String),

    /// A map or form that must be (completely) positive is not.
    #[error("positivity failure: min eigenvalue {min_eig:.3e}")]
    NotPositive { min_eig: f64 },
}

pub type Result<T> = std::result::Result<T, CorrError>;
