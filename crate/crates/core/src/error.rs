use thiserror::Error;

/// Errors raised by the numerical kernels and the decomposition routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not symmetric (asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix is not positive definite (pivot {pivot:e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error(
        "eigensolver did not converge within {sweeps} sweeps (off-diagonal mass {off_diagonal:e})"
    )]
    NoConvergence { sweeps: usize, off_diagonal: f64 },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("eigenvalues of -(JM)^2 do not come in equal pairs ({first:e} vs {second:e})")]
    UnpairedEigenvalue { first: f64, second: f64 },

    #[error("state is not physical (minimum symplectic eigenvalue {min_lambda})")]
    Unphysical { min_lambda: f64 },

    #[error("covariance matrix is not isotropic (deviation {deviation:e})")]
    NotIsotropic { deviation: f64 },

    #[error("state is not pure (symplectic eigenvalue {lambda} differs from 1/2)")]
    NotPure { lambda: f64 },

    #[error("local spectra do not match: {0}")]
    DegeneracyMismatch(String),

    #[error("extracted coupling is not orthogonal-symplectic (residual {residual:e} for lambda {lambda})")]
    CouplingResidual { lambda: f64, residual: f64 },

    #[error("mode index {index} out of range for {modes} modes")]
    IndexOutOfRange { index: usize, modes: usize },

    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),

    #[error("entropy routes disagree: pair sum {pair_sum} vs reduced spectrum {reduced}")]
    InconsistentEntropy { pair_sum: f64, reduced: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
