use thiserror::Error;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{func}: argument outside the domain ({detail})")]
    Domain { func: &'static str, detail: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{func}: precision loss, cancellation ratio {ratio:.3e} exceeds the cap")]
    PrecisionLoss { func: &'static str, ratio: f64 },

    #[error("{func}: no convergence after {iterations} iterations, last bracket [{lo}, {hi}]")]
    NoConvergence {
        func: &'static str,
        iterations: usize,
        lo: f64,
        hi: f64,
    },

    #[error("quadrature did not reach tolerance: estimate {value:e}, error estimate {abs_err:e}")]
    Quadrature { value: f64, abs_err: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        func,
        detail: detail.into(),
    }
}
