use thiserror::Error;

/// Errors raised across the library. Each variant maps to a failure class
/// that callers (notably the CLI) translate into distinct exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole at {0}")]
    Pole(String),

    #[error("quadrature did not converge (error estimate {estimate:e} after {panels} panels)")]
    Convergence { estimate: f64, panels: usize },

    #[error("truncation: {0}")]
    Truncation(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("sampling error: {0}")]
    Sampling(String),
}

pub type Result<T> = std::result::Result<T, Error>;
