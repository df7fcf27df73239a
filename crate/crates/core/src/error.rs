use thiserror::Error;

/// Errors produced by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} did not converge (best estimate {estimate:e}, error {error:e})")]
    NonConvergence {
        what: String,
        estimate: f64,
        error: f64,
    },

    #[error("integral diverges (log-log growth slope {slope:.4})")]
    Divergent { slope: f64 },

    #[error("unsupported angular sector ell = {0}")]
    UnsupportedSector(u32),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("admissibility window is empty: {0}")]
    EmptyWindow(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn ensure_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be finite, got {x}")))
    }
}
