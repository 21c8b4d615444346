//! Crate-wide error type.

/// Broad failure category, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Data,
    Numerical,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("insufficient history: need more than {required} observations, got {got}")]
    InsufficientHistory { required: usize, got: usize },

    #[error(
        "optimizer did not converge after {starts} starts; best iterate sigma={sigma:.6e} nu={nu:.4} phi={phi:?} loglik={loglik:.6}"
    )]
    FitNonConvergence {
        starts: usize,
        sigma: f64,
        nu: f64,
        phi: Option<f64>,
        loglik: f64,
    },

    #[error("quadrature failure: {0}")]
    Quadrature(#[from] crate::num::quad::QuadError),

    #[error("root search exhausted all fallbacks; best residual {best_residual:.3e} at x={x:.6e}")]
    RootSearch { best_residual: f64, x: f64 },

    #[error("degenerate series: {0}")]
    DegenerateSeries(String),

    #[error("{failed} of {total} days failed estimation (threshold {threshold_pct}%): {first_error}")]
    TooManyFailures {
        failed: usize,
        total: usize,
        threshold_pct: u8,
        first_error: String,
    },

    #[error("{0}")]
    Numerical(String),
}

impl Error {
    /// Coarse classification for process exit codes.
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse { .. }
            | Error::Io(_)
            | Error::InvalidInput(_)
            | Error::InsufficientHistory { .. }
            | Error::DegenerateSeries(_) => ErrorKind::Data,
            Error::FitNonConvergence { .. }
            | Error::Quadrature(_)
            | Error::RootSearch { .. }
            | Error::TooManyFailures { .. }
            | Error::Numerical(_) => ErrorKind::Numerical,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
