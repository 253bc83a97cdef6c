//! Hermitian eigendecomposition, PSD testing, condition estimates and the
//! checked inverse.

use num_complex::Complex64;

use super::jacobi::{canonicalize_column_phases, jacobi_drive};
use super::matrix::CMatrix;
use crate::error::{Error, Result};

/// Condition limit beyond which inverses are refused by default. Past this
/// point double-precision factorization results carry no usable digits.
pub const DEFAULT_COND_LIMIT: f64 = 1e12;

/// Eigendecomposition of a hermitian matrix: `x = V diag(eigenvalues) V*`.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Eigenvalues in ascending order.
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub vectors: CMatrix,
}

/// Eigendecomposition by cyclic Jacobi sweeps.
///
/// The input must be hermitian within `tol` in Frobenius norm; the
/// decomposition is computed on the hermitian part so the reported
/// eigenvalues are exactly real.
pub fn hermitian_eig(x: &CMatrix, tol: f64) -> Result<HermitianEig> {
    if !x.is_square() {
        return Err(Error::InvalidMatrix(
            "eigendecomposition of a non-square matrix".into(),
        ));
    }
    let residual = x.hermitian_residual();
    if !(residual <= tol) {
        return Err(Error::NotHermitian { residual, tol });
    }
    let herm = (x + &x.adjoint()).scale(Complex64::new(0.5, 0.0));
    let n = herm.rows();
    let mut family = vec![herm];
    let mut u = CMatrix::identity(n);
    // a hermitian Jacobi that fails to converge in 200 sweeps would signal
    // corrupt input, which the finiteness check already excludes
    let outcome = jacobi_drive(&mut family, &mut u, 200);
    if !outcome.converged {
        return Err(Error::NonConvergence {
            sweeps: outcome.sweeps_used,
            residual: family[0].off_diagonal_norm(),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag = family[0].diagonal_entries();
    order.sort_by(|&a, &b| diag[a].re.total_cmp(&diag[b].re));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i].re).collect();
    let mut vectors = CMatrix::from_fn(n, n, |i, j| u[(i, order[j])]);
    canonicalize_column_phases(&mut vectors);
    Ok(HermitianEig {
        eigenvalues,
        vectors,
    })
}

impl HermitianEig {
    /// Rebuilds `V diag(lambda) V*`.
    pub fn reconstruct(&self) -> CMatrix {
        let lambda: Vec<Complex64> = self
            .eigenvalues
            .iter()
            .map(|&l| Complex64::new(l, 0.0))
            .collect();
        &(&self.vectors * &CMatrix::diagonal(&lambda)) * &self.vectors.adjoint()
    }
}

/// Smallest eigenvalue of the hermitian part `(X + X*)/2`.
///
/// The input must be hermitian within `herm_tol`; the sign of the result is
/// the PSD verdict for Gram matrices.
pub fn psd_min_eigenvalue(x: &CMatrix, herm_tol: f64) -> Result<f64> {
    let residual = x.hermitian_residual();
    if !(residual <= herm_tol) {
        return Err(Error::NotHermitian {
            residual,
            tol: herm_tol,
        });
    }
    let eig = hermitian_eig(x, herm_tol)?;
    Ok(eig.eigenvalues[0])
}

/// 2-norm condition estimate from the singular values, computed as the
/// square roots of the eigenvalues of `X* X`. Returns infinity when the
/// smallest singular value is at rounding level.
pub fn cond_estimate(x: &CMatrix) -> Result<f64> {
    if !x.is_square() {
        return Err(Error::InvalidMatrix(
            "condition of a non-square matrix".into(),
        ));
    }
    let gram = &x.adjoint() * x;
    let herm_tol = 1e-12 * (1.0 + gram.frobenius_norm());
    let eig = hermitian_eig(&gram, herm_tol)?;
    let n = x.rows();
    let max = eig.eigenvalues[n - 1].max(0.0);
    let min = eig.eigenvalues[0].max(0.0);
    if max == 0.0 {
        return Ok(f64::INFINITY);
    }
    // singular values below n*eps*sigma_max are indistinguishable from zero
    let floor = (n as f64) * 1e-16 * max.sqrt();
    let sigma_min = min.sqrt();
    if sigma_min <= floor {
        Ok(f64::INFINITY)
    } else {
        Ok(max.sqrt() / sigma_min)
    }
}

/// Inverse with a conditioning gate: refuses matrices whose condition
/// estimate exceeds `cond_limit`, and reports truly singular input
/// separately.
pub fn inverse(x: &CMatrix, cond_limit: f64) -> Result<CMatrix> {
    let cond = cond_estimate(x)?;
    if cond.is_infinite() {
        return Err(Error::Singular);
    }
    if cond > cond_limit {
        return Err(Error::IllConditioned {
            cond,
            limit: cond_limit,
        });
    }
    x.gauss_jordan_inverse()
}

/// Low-rank factor of a PSD matrix by diagonally pivoted Cholesky:
/// returns `L` of shape n x r with `L L* = X` up to the pivot tolerance.
///
/// This is an independent factorization route used to cross-check
/// eigendecomposition-based feature maps; the two must agree up to a
/// unitary.
pub fn pivoted_cholesky_psd(x: &CMatrix, rel_tol: f64) -> Result<CMatrix> {
    let herm_tol = 1e-10 * (1.0 + x.frobenius_norm());
    let residual = x.hermitian_residual();
    if !(residual <= herm_tol) {
        return Err(Error::NotHermitian {
            residual,
            tol: herm_tol,
        });
    }
    let n = x.rows();
    let mut diag: Vec<f64> = (0..n).map(|i| x[(i, i)].re).collect();
    let initial_max = diag.iter().cloned().fold(0.0f64, f64::max);
    if initial_max <= 0.0 {
        // a PSD matrix with no positive diagonal entry is the zero matrix;
        // anything else with this profile is indefinite
        if x.frobenius_norm() > 1e-14 * (1.0 + n as f64) {
            return Err(Error::NotPsd {
                min_eig: diag.iter().cloned().fold(0.0f64, f64::min),
            });
        }
        // rank-0 factor is not representable as a CMatrix, so report one
        // zero column
        return CMatrix::new(n, 1, vec![Complex64::new(0.0, 0.0); n]);
    }
    let mut cols: Vec<Vec<Complex64>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for _ in 0..n {
        let mut best = 0;
        let mut best_val = f64::NEG_INFINITY;
        for i in 0..n {
            if !pivots.contains(&i) && diag[i] > best_val {
                best_val = diag[i];
                best = i;
            }
        }
        if best_val < -rel_tol * initial_max * 100.0 {
            return Err(Error::NotPsd { min_eig: best_val });
        }
        if best_val <= rel_tol * initial_max {
            break;
        }
        let pivot = best_val.sqrt();
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for (i, slot) in col.iter_mut().enumerate() {
            let mut v = x[(i, best)];
            for prev in &cols {
                v -= prev[i] * prev[best].conj();
            }
            *slot = v / pivot;
        }
        for i in 0..n {
            diag[i] -= col[i].norm_sqr();
        }
        cols.push(col);
        pivots.push(best);
    }
    let r = cols.len();
    Ok(CMatrix::from_fn(n, r, |i, j| cols[j][i]))
}
