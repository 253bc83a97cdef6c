//! Operator-valued cosine functions on finite abelian groups: forward
//! construction from characters, exhaustive verification of the defining
//! functional equation, kernel-theoretic checks, and inverse factorization
//! back to characters and a change of basis.
//!
//! The central object is a map `Phi` from a finite abelian group into the
//! n x n complex matrices satisfying
//!
//! ```text
//! Phi(x+y) + mu(y) Phi(x-y) = 2 Phi(x) Phi(y),    Phi(e) = I
//! ```
//!
//! for a character `mu` of the group. Every hermitian solution factors as
//! `Phi(x) = A diag((chi_i(x) + mu(x) chi_i(-x))/2) A^-1` for characters
//! `chi_i` and an invertible `A`; this crate builds such solutions, verifies
//! candidate tables exhaustively over all group pairs, and recovers the
//! factorization from a bare table.
//!
//! Modules follow the pipeline:
//!
//! - [`group`]: finite abelian groups, elements, characters, dual groups.
//! - [`numerics`]: the complex dense-matrix kernel (eigendecomposition,
//!   joint diagonalization, inverses with condition gating).
//! - [`cosine`]: operator function tables, construction and verification.
//! - [`kernel`]: positive definite kernels attached to scalar slices and
//!   their finite-dimensional feature-map realizations.
//! - [`factor`]: inverse problems, from scalar solution enumeration to the
//!   full hermitianize-then-factor pipeline.
//! - [`instances`]: seeded, reproducible instance generation.
//! - [`io`]: the JSON file formats shared with the CLI.

//! Every operation is a pure function of immutable inputs (plus an explicit
//! seed where an algorithm calls for randomness), so concurrent use needs no
//! synchronization and fixed inputs give bit-identical outputs.

pub mod cosine;
pub mod error;
pub mod factor;
pub mod group;
pub mod instances;
pub mod io;
pub mod kernel;
pub mod numerics;

pub use cosine::{OperatorFunction, VerificationReport};
pub use error::{Error, Result};
pub use factor::Factorization;
pub use group::{Character, GroupElement, GroupSpec, ScalarFunction};
pub use kernel::{KernelTable, RkhsRealization};
pub use numerics::{CMatrix, JointDiagResult};
