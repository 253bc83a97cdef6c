//! Error type shared by the whole crate.

use thiserror::Error;

/// Errors produced by group, matrix and factorization operations.
///
/// Structural errors (dimension mismatches, malformed inputs) are kept
/// apart from mathematical failures (non-hermitian input, singular matrix,
/// non-convergence) so that callers can map them to distinct exit codes.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid group spec: {0}")]
    InvalidGroup(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("incomplete table: expected {expected} entries, got {got}")]
    IncompleteTable { expected: usize, got: usize },

    #[error("matrix is not hermitian: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { residual: f64, tol: f64 },

    #[error("matrix family member is not normal: residual {residual:.3e}")]
    NotNormal { residual: f64 },

    #[error("matrix family does not commute: worst commutator norm {residual:.3e}")]
    NotCommuting { residual: f64 },

    #[error("iteration did not converge after {sweeps} sweeps (residual {residual:.3e})")]
    NonConvergence { sweeps: usize, residual: f64 },

    #[error("matrix is singular")]
    Singular,

    #[error("matrix is ill-conditioned: condition estimate {cond:.3e} exceeds limit {limit:.3e}")]
    IllConditioned { cond: f64, limit: f64 },

    #[error("operator function is not multiplicative: worst pair residual {residual:.3e}")]
    NotMultiplicative { residual: f64 },

    #[error("not a cosine-equation solution: {0}")]
    NotASolution(String),

    #[error("kernel gram matrix is not positive semidefinite: min eigenvalue {min_eig:.3e}")]
    NotPsd { min_eig: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable machine-readable reason code, used by the CLI diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidGroup(_) => "invalid_group",
            Error::InvalidMatrix(_) => "invalid_matrix",
            Error::IncompleteTable { .. } => "incomplete_table",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::NotNormal { .. } => "not_normal",
            Error::NotCommuting { .. } => "not_commuting",
            Error::NonConvergence { .. } => "non_convergence",
            Error::Singular => "singular",
            Error::IllConditioned { .. } => "ill_conditioned",
            Error::NotMultiplicative { .. } => "not_multiplicative",
            Error::NotASolution(_) => "not_a_solution",
            Error::NotPsd { .. } => "not_psd",
            Error::InvalidInput(_) => "invalid_input",
        }
    }

    /// True for errors that flag malformed input rather than a mathematical
    /// failure on well-formed input.
    pub fn is_structural(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch { .. }
                | Error::InvalidGroup(_)
                | Error::InvalidMatrix(_)
                | Error::IncompleteTable { .. }
                | Error::InvalidInput(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
