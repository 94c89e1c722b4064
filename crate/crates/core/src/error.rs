use thiserror::Error;

/// Errors raised by the numeric, sampling and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative method ran out of budget before meeting its tolerance.
    #[error("numerical failure in {context}: best estimate {best_estimate:e}, error estimate {error_estimate:e}")]
    NumericalFailure {
        context: String,
        best_estimate: f64,
        error_estimate: f64,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A density failed its normalization check.
    #[error("invalid density: normalization residual {residual:e} exceeds {limit:e}")]
    InvalidDensity { residual: f64, limit: f64 },

    /// Conditioning on a syndrome kept too few samples to form a statistic.
    #[error("insufficient samples: {hits} hits, at least {required} required")]
    InsufficientSamples { hits: usize, required: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
