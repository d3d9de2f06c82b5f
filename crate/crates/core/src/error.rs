use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("trace must be 1, got {0}")]
    BadTrace(f64),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("basis is not orthonormal (deviation {0:.3e})")]
    NotOrthonormal(f64),

    #[error("effect {0} is not a rank-1 projector")]
    NotRankOneProjector(usize),

    #[error("effects do not sum to the identity (deviation {0:.3e})")]
    Incomplete(f64),

    #[error("invalid priors: {0}")]
    InvalidPriors(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("even dimension required, got {0}")]
    OddDimension(usize),

    #[error("entangled state required")]
    NotEntangled,

    #[error("Schmidt coefficient {0} is zero; full Schmidt rank required")]
    ZeroCoefficient(usize),

    #[error("solver did not converge after {iterations} iterations (best gap {best_gap:.3e})")]
    NonConvergence { iterations: usize, best_gap: f64 },

    #[error("capability exceeded: {0}")]
    Capability(String),
}

pub type Result<T> = std::result::Result<T, Error>;
