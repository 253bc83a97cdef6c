//! Complex dense-matrix kernel: adjoints, products, inverses, hermitian
//! eigendecomposition, PSD testing, and simultaneous diagonalization of
//! commuting normal families.
//!
//! Everything here is pure and deterministic: a fixed input produces a
//! bit-identical output, with no internal randomness or racy reductions.

mod eig;
mod general;
mod jacobi;
mod jointdiag;
mod matrix;

pub use eig::{
    cond_estimate, hermitian_eig, inverse, pivoted_cholesky_psd, psd_min_eigenvalue, HermitianEig,
    DEFAULT_COND_LIMIT,
};
pub use general::{general_eigenvalues, inverse_iteration, solve_floored};
pub use jointdiag::{joint_diagonalize, JointDiagResult, DEFAULT_JOINT_TOL, DEFAULT_MAX_SWEEPS};
pub use matrix::CMatrix;
