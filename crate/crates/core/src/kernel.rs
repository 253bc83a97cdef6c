//! The kernel `K_f(x,y) = (f(-y+x) + mu(x) f(-y-x)) / 2` attached to a
//! scalar table, its unconditional algebraic identities, positive
//! definiteness, and a finite-dimensional feature-map realization of the
//! associated reproducing-kernel space.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{Character, GroupSpec, ScalarFunction};
use crate::numerics::{hermitian_eig, pivoted_cholesky_psd, psd_min_eigenvalue, CMatrix};

/// Default relative rank tolerance: eigenvalues below this fraction of the
/// largest one count as nullspace, which separates true rank from rounding.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// The full Gram table of the kernel attached to a scalar function.
#[derive(Debug, Clone)]
pub struct KernelTable {
    spec: GroupSpec,
    mu: Character,
    gram: CMatrix,
    source: ScalarFunction,
}

impl KernelTable {
    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn mu(&self) -> &Character {
        &self.mu
    }

    /// `gram[x][y] = K_f(x, y)` in canonical element order.
    pub fn gram(&self) -> &CMatrix {
        &self.gram
    }

    /// The generating scalar table.
    pub fn source(&self) -> &ScalarFunction {
        &self.source
    }
}

/// Residuals of the two boundary identities, which hold for every `f`
/// whether or not it solves anything.
#[derive(Debug, Clone)]
pub struct BoundaryReport {
    /// Max over y of `| K_f(0, -y) - f(y) |`.
    pub f_recovery_residual: f64,
    /// Max over x of `| K_f(x, 0) - f_plus(x) |`.
    pub even_part_residual: f64,
    pub passed: bool,
}

/// PSD verdict for a kernel table.
#[derive(Debug, Clone)]
pub struct PsdReport {
    pub min_eig: f64,
    pub is_psd: bool,
}

/// A feature map `T` with `<T(x), T(y)> = K(x,y)`: the finite-dimensional
/// stand-in for the reproducing-kernel Hilbert space, whose completion is a
/// no-op at this scale.
#[derive(Debug, Clone)]
pub struct RkhsRealization {
    /// Dimension of the feature span.
    pub rank: usize,
    /// One feature vector of length `rank` per group element, canonical
    /// order.
    pub features: Vec<Vec<Complex64>>,
    /// Max pointwise deviation of `<T(x), T(y)>` from the Gram table. The
    /// reproducing property is this same bound read along Gram columns.
    pub gram_residual: f64,
}

impl RkhsRealization {
    /// Features as a `|G| x rank` matrix. Fails for rank 0.
    pub fn feature_matrix(&self) -> Result<CMatrix> {
        if self.rank == 0 {
            return Err(Error::InvalidInput(
                "rank-0 realization has no feature matrix".into(),
            ));
        }
        let rows = self.features.len();
        Ok(CMatrix::from_fn(rows, self.rank, |i, j| {
            self.features[i][j]
        }))
    }
}

/// Builds the Gram table `gram[x][y] = (f(-y+x) + mu(x) f(-y-x)) / 2`.
pub fn build_kernel(spec: &GroupSpec, mu: &Character, f: &ScalarFunction) -> Result<KernelTable> {
    if f.spec() != spec {
        return Err(Error::InvalidInput(
            "scalar table belongs to a different group".into(),
        ));
    }
    let elements = spec.elements();
    let order = spec.order();
    let mut gram = CMatrix::zeros(order, order);
    for (i, x) in elements.iter().enumerate() {
        let mu_x = spec.char_eval(mu, x)?;
        for (j, y) in elements.iter().enumerate() {
            let diff = spec.sub(x, y)?;
            let neg_sum = spec.neg(&spec.add(x, y)?)?;
            let v = (f.value_at(&diff)? + mu_x * f.value_at(&neg_sum)?) * Complex64::new(0.5, 0.0);
            gram[(i, j)] = v;
        }
    }
    Ok(KernelTable {
        spec: spec.clone(),
        mu: mu.clone(),
        gram,
        source: f.clone(),
    })
}

/// Splits `f` into its mu-even and mu-odd parts:
/// `f_plus(x) = (f(x) + mu(x) f(-x))/2`, `f_minus = f - f_plus` computed
/// symmetrically. The two sum back to `f` up to one rounding.
pub fn parity_split(
    spec: &GroupSpec,
    mu: &Character,
    f: &ScalarFunction,
) -> Result<(ScalarFunction, ScalarFunction)> {
    if f.spec() != spec {
        return Err(Error::InvalidInput(
            "scalar table belongs to a different group".into(),
        ));
    }
    let mut plus = Vec::with_capacity(spec.order());
    let mut minus = Vec::with_capacity(spec.order());
    for x in spec.elements() {
        let neg = spec.neg(&x)?;
        let reflected = spec.char_eval(mu, &x)? * f.value_at(&neg)?;
        let v = f.value_at(&x)?;
        plus.push((v + reflected) * Complex64::new(0.5, 0.0));
        minus.push((v - reflected) * Complex64::new(0.5, 0.0));
    }
    Ok((
        ScalarFunction::new(spec.clone(), plus)?,
        ScalarFunction::new(spec.clone(), minus)?,
    ))
}

/// Checks the boundary identities `K_f(0,-y) = f(y)` and
/// `K_f(x,0) = f_plus(x)`. These are unconditional: they must vanish for
/// any `f`, solution or not.
pub fn kernel_boundary_checks(k: &KernelTable, tol: f64) -> Result<BoundaryReport> {
    let spec = &k.spec;
    let f = &k.source;
    let zero_idx = spec.element_index(&spec.identity())?;

    let mut f_recovery = 0.0f64;
    for (j, y) in spec.elements().iter().enumerate() {
        let neg_idx = spec.element_index(&spec.neg(y)?)?;
        f_recovery = f_recovery.max((k.gram[(zero_idx, neg_idx)] - f.value_at_index(j)).norm());
    }

    let (f_plus, _) = parity_split(spec, &k.mu, f)?;
    let mut even_part = 0.0f64;
    for i in 0..spec.order() {
        even_part = even_part.max((k.gram[(i, zero_idx)] - f_plus.value_at_index(i)).norm());
    }

    Ok(BoundaryReport {
        f_recovery_residual: f_recovery,
        even_part_residual: even_part,
        passed: f_recovery <= tol && even_part <= tol,
    })
}

/// PSD test on the full Gram matrix. On a finite group this is equivalent
/// to nonnegativity of the kernel form over arbitrary finite selections,
/// since any selection is a sub-Gram matrix.
///
/// The gram must be hermitian within a `tol`-relative bound, which is
/// guaranteed when `f` is a slice of a hermitian solution; anything else is
/// flagged as a contract violation rather than silently projected.
pub fn psd_check(k: &KernelTable, tol: f64) -> Result<PsdReport> {
    let herm_tol = tol * (1.0 + k.gram.frobenius_norm());
    let min_eig = psd_min_eigenvalue(&k.gram, herm_tol)?;
    Ok(PsdReport {
        min_eig,
        is_psd: min_eig >= -tol,
    })
}

/// Feature-map realization from the eigendecomposition of the Gram table:
/// eigenvalues below `rank_tol` times the largest are dropped, small
/// negative ones (rounding noise) are clamped to zero before the square
/// root, and `T(x)` is row `x` of `V sqrt(diag(lambda))` on the kept
/// columns.
pub fn rkhs_realize(k: &KernelTable, rank_tol: f64) -> Result<RkhsRealization> {
    let herm_tol = 1e-10 * (1.0 + k.gram.frobenius_norm());
    let eig = hermitian_eig(&k.gram, herm_tol)?;
    let n = k.spec.order();
    let lambda_max = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let lambda_min = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::min);
    if lambda_min < -rank_tol * lambda_max.max(1e-300) - 1e-12 * (1.0 + lambda_max) {
        return Err(Error::NotPsd {
            min_eig: lambda_min,
        });
    }

    // kept columns, largest eigenvalue first for a deterministic layout
    let mut kept: Vec<(usize, f64)> = eig
        .eigenvalues
        .iter()
        .cloned()
        .enumerate()
        .filter(|&(_, l)| l > 0.0 && l >= rank_tol * lambda_max)
        .collect();
    kept.sort_by(|a, b| b.1.total_cmp(&a.1));

    let rank = kept.len();
    let mut features = vec![vec![Complex64::new(0.0, 0.0); rank]; n];
    for (col, &(src, lambda)) in kept.iter().enumerate() {
        let w = lambda.max(0.0).sqrt();
        for (row, feat) in features.iter_mut().enumerate() {
            feat[col] = eig.vectors[(row, src)] * w;
        }
    }

    let gram_residual = feature_gram_residual(&features, &k.gram);
    Ok(RkhsRealization {
        rank,
        features,
        gram_residual,
    })
}

/// Independent second realization route: diagonally pivoted Cholesky of the
/// Gram table. Used to witness the uniqueness clause: any two realizations
/// of the same kernel at the same rank are unitarily related.
pub fn realize_via_cholesky(k: &KernelTable, rank_tol: f64) -> Result<RkhsRealization> {
    let l = pivoted_cholesky_psd(&k.gram, rank_tol)?;
    let n = k.spec.order();
    // the factor of the zero kernel comes back as a single zero column
    let rank = if l.frobenius_norm() == 0.0 {
        0
    } else {
        l.cols()
    };
    let features: Vec<Vec<Complex64>> = (0..n)
        .map(|i| (0..rank).map(|j| l[(i, j)]).collect())
        .collect();
    let gram_residual = feature_gram_residual(&features, &k.gram);
    Ok(RkhsRealization {
        rank,
        features,
        gram_residual,
    })
}

fn feature_gram_residual(features: &[Vec<Complex64>], gram: &CMatrix) -> f64 {
    let n = features.len();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let ip: Complex64 = features[i]
                .iter()
                .zip(&features[j])
                .map(|(a, b)| a * b.conj())
                .sum();
            worst = worst.max((ip - gram[(i, j)]).norm());
        }
    }
    worst
}

/// Solves the orthogonal Procrustes problem between two realizations of the
/// same kernel: the unitary `W` minimizing `|| T_a W - T_b ||_F`, found from
/// the polar factor of `T_a* T_b`. Returns `W` and the alignment residual.
pub fn unitary_alignment(a: &RkhsRealization, b: &RkhsRealization) -> Result<(CMatrix, f64)> {
    if a.rank != b.rank {
        return Err(Error::DimensionMismatch {
            expected: a.rank,
            got: b.rank,
        });
    }
    let ta = a.feature_matrix()?;
    let tb = b.feature_matrix()?;
    if ta.rows() != tb.rows() {
        return Err(Error::DimensionMismatch {
            expected: ta.rows(),
            got: tb.rows(),
        });
    }
    let cross = &ta.adjoint() * &tb;
    let gram = &cross.adjoint() * &cross;
    let herm_tol = 1e-10 * (1.0 + gram.frobenius_norm());
    let eig = hermitian_eig(&gram, herm_tol)?;
    let sigma: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let sigma_max = sigma.iter().cloned().fold(0.0f64, f64::max);
    if sigma.iter().any(|&s| s <= 1e-12 * sigma_max.max(1e-300)) {
        return Err(Error::Singular);
    }
    let inv_sigma: Vec<Complex64> = sigma
        .iter()
        .map(|&s| Complex64::new(1.0 / s, 0.0))
        .collect();
    // polar factor W = B V diag(1/sigma) V*
    let w = &(&(&cross * &eig.vectors) * &CMatrix::diagonal(&inv_sigma)) * &eig.vectors.adjoint();
    let residual = (&ta * &w).distance(&tb);
    Ok((w, residual))
}

/// Residual of the translation-operator expansion of the kernel: with
/// `(R_y h)(z) = h(z+y)` and `reflected f(z) = f(-z)`, the row `K_f(x, .)`
/// equals `((R_{-x} + mu(x) R_x) reflected_f) / 2`. Vanishes identically
/// for every `f`.
pub fn regular_representation_identity(k: &KernelTable) -> f64 {
    let spec = &k.spec;
    let f = &k.source;
    let elements = spec.elements();
    let reflected: Vec<Complex64> = elements
        .iter()
        .map(|z| {
            let neg = spec.neg(z).expect("valid element");
            f.value_at(&neg).expect("total table")
        })
        .collect();
    let mut worst = 0.0f64;
    for (i, x) in elements.iter().enumerate() {
        let mu_x = spec.char_eval(&k.mu, x).expect("valid character");
        for (j, y) in elements.iter().enumerate() {
            // (R_{-x} reflected)(y) = reflected(y - x)
            let back = spec
                .element_index(&spec.sub(y, x).expect("valid"))
                .expect("in group");
            // (R_x reflected)(y) = reflected(y + x)
            let fwd = spec
                .element_index(&spec.add(y, x).expect("valid"))
                .expect("in group");
            let row_value = (reflected[back] + mu_x * reflected[fwd]) * Complex64::new(0.5, 0.0);
            worst = worst.max((k.gram[(i, j)] - row_value).norm());
        }
    }
    worst
}
