//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix dimension {0} outside supported range 2..=16")]
    Dimension(usize),

    #[error("non-finite entry at ({0}, {1})")]
    NonFinite(usize, usize),

    #[error("arity mismatch: function expects {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:.3e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("base point is not diagonal (off-diagonal magnitude {0:.3e})")]
    NonDiagonalBase(f64),

    #[error("negative tie tolerance {0}")]
    NegativeTieTol(f64),

    #[error("contact angle {0} rad outside (0, pi) excluding pi/2")]
    InvalidAngle(f64),

    #[error("invalid competitor parameter: {0}")]
    InvalidCompetitor(String),

    #[error("jet constraint violated: {0}")]
    JetConstraint(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
