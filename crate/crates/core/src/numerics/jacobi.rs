//! Unitary Jacobi rotation engine.
//!
//! One sweep driver serves both the single-matrix hermitian eigensolver and
//! the joint diagonalizer of commuting normal families. The plane rotation
//! for a pair (p,q) is chosen to maximize the diagonal mass of the 2x2
//! (p,q)-blocks summed over the whole family; since unitary similarity
//! preserves the Frobenius norm of each block and of the rows/columns outside
//! it, this is exactly the rotation that minimizes the family's combined
//! off-diagonal mass. For a single hermitian matrix it reduces to the
//! classical Jacobi rotation.

use num_complex::Complex64;

use super::matrix::CMatrix;

/// Rotations with |s| at or below this are skipped; a sweep that skips all
/// pairs has converged.
const ROTATION_EPS: f64 = 1e-15;

pub(crate) struct SweepOutcome {
    pub sweeps_used: usize,
    pub converged: bool,
}

/// Dominant eigenvector of a real symmetric 3x3 matrix, by cyclic Jacobi.
/// Returned with unit norm and a nonnegative first component.
fn sym3_dominant_eigenvector(g: [[f64; 3]; 3]) -> [f64; 3] {
    let mut a = g;
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let scale = a
        .iter()
        .flatten()
        .map(|x| x.abs())
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);

    for _ in 0..24 {
        let off = (a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2)).sqrt();
        if off <= 1e-16 * scale {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            if a[p][q].abs() <= 1e-18 * scale {
                continue;
            }
            let theta = 0.5 * (2.0 * a[p][q]).atan2(a[q][q] - a[p][p]);
            let (s, c) = theta.sin_cos();
            for k in 0..3 {
                let (akp, akq) = (a[k][p], a[k][q]);
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let (apk, aqk) = (a[p][k], a[q][k]);
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
            for k in 0..3 {
                let (vkp, vkq) = (v[k][p], v[k][q]);
                v[k][p] = c * vkp - s * vkq;
                v[k][q] = s * vkp + c * vkq;
            }
        }
    }

    let mut best = 0;
    for i in 1..3 {
        if a[i][i] > a[best][best] {
            best = i;
        }
    }
    let mut w = [v[0][best], v[1][best], v[2][best]];
    let norm = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
    if norm > 0.0 {
        for x in &mut w {
            *x /= norm;
        }
    } else {
        w = [1.0, 0.0, 0.0];
    }
    if w[0] < 0.0 {
        for x in &mut w {
            *x = -*x;
        }
    }
    w
}

/// Optimal plane rotation (c real, s complex, c^2 + |s|^2 = 1) for the pair
/// (p,q) over the whole family.
///
/// With a = A_pp, b = A_pq, c2 = A_qp, d = A_qq per family member, the
/// change in diagonal block mass under the rotation is governed by
/// |h . w|^2 where h = [a-d, b+c2, i(b-c2)] and w is a real unit 3-vector
/// parametrizing the rotation. Summing over the family gives the quadratic
/// form G = sum Re(h h*), maximized by its dominant eigenvector.
fn pair_rotation(family: &[CMatrix], p: usize, q: usize) -> (f64, Complex64) {
    let mut g = [[0.0f64; 3]; 3];
    for a in family {
        let h = [
            a[(p, p)] - a[(q, q)],
            a[(p, q)] + a[(q, p)],
            Complex64::new(0.0, 1.0) * (a[(p, q)] - a[(q, p)]),
        ];
        for i in 0..3 {
            for j in 0..3 {
                g[i][j] += (h[i] * h[j].conj()).re;
            }
        }
    }
    let w = sym3_dominant_eigenvector(g);
    let c = ((1.0 + w[0]) / 2.0).sqrt();
    // 2c = sqrt(2 (1 + w0)) which is bounded away from 0 since w0 >= 0
    let s = Complex64::new(-w[1], -w[2]) / (2.0 * c);
    (c, s)
}

/// Applies the similarity A <- R* A R where R is the identity except for
/// R_pp = c, R_pq = conj(s), R_qp = -s, R_qq = c.
fn apply_similarity(a: &mut CMatrix, p: usize, q: usize, c: f64, s: Complex64) {
    let n = a.rows();
    for i in 0..n {
        let (aip, aiq) = (a[(i, p)], a[(i, q)]);
        a[(i, p)] = c * aip - s * aiq;
        a[(i, q)] = s.conj() * aip + c * aiq;
    }
    for j in 0..n {
        let (apj, aqj) = (a[(p, j)], a[(q, j)]);
        a[(p, j)] = c * apj - s.conj() * aqj;
        a[(q, j)] = s * apj + c * aqj;
    }
}

/// Accumulates U <- U R so that the final conjugation is U* A U.
fn apply_right(u: &mut CMatrix, p: usize, q: usize, c: f64, s: Complex64) {
    let n = u.rows();
    for i in 0..n {
        let (uip, uiq) = (u[(i, p)], u[(i, q)]);
        u[(i, p)] = c * uip - s * uiq;
        u[(i, q)] = s.conj() * uip + c * uiq;
    }
}

/// Cyclic sweeps over all pairs until no rotation above the skip threshold
/// is applied or the sweep budget runs out. Mutates the family in place and
/// accumulates the transform into `u`.
///
/// Pairs whose off-diagonal mass is already at rounding level are skipped
/// outright: inside a degenerate block the rotation selector would
/// otherwise chase noise forever without reducing anything.
pub(crate) fn jacobi_drive(
    family: &mut [CMatrix],
    u: &mut CMatrix,
    max_sweeps: usize,
) -> SweepOutcome {
    let n = u.rows();
    if n < 2 {
        return SweepOutcome {
            sweeps_used: 0,
            converged: true,
        };
    }
    let scale = family
        .iter()
        .map(CMatrix::frobenius_norm)
        .fold(0.0f64, f64::max);
    let off_threshold = ROTATION_EPS * (1.0 + scale);
    for sweep in 0..max_sweeps {
        let mut max_s = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                let off_mass: f64 = family
                    .iter()
                    .map(|a| a[(p, q)].norm_sqr() + a[(q, p)].norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                if off_mass <= off_threshold {
                    continue;
                }
                let (c, s) = pair_rotation(family, p, q);
                if s.norm() <= ROTATION_EPS {
                    continue;
                }
                for a in family.iter_mut() {
                    apply_similarity(a, p, q, c, s);
                }
                apply_right(u, p, q, c, s);
                max_s = max_s.max(s.norm());
            }
        }
        if max_s <= ROTATION_EPS {
            return SweepOutcome {
                sweeps_used: sweep + 1,
                converged: true,
            };
        }
    }
    SweepOutcome {
        sweeps_used: max_sweeps,
        converged: false,
    }
}

/// Rescales each column so its largest-modulus entry is real positive.
/// Deterministic tie-break: the first entry attaining the maximum wins.
pub(crate) fn canonicalize_column_phases(u: &mut CMatrix) {
    let (rows, cols) = (u.rows(), u.cols());
    for j in 0..cols {
        let mut best = 0;
        let mut best_mag = 0.0;
        for i in 0..rows {
            let mag = u[(i, j)].norm();
            if mag > best_mag + 1e-14 {
                best_mag = mag;
                best = i;
            }
        }
        if best_mag > 0.0 {
            let phase = u[(best, j)] / best_mag;
            let correction = phase.conj();
            for i in 0..rows {
                let v = u[(i, j)];
                u[(i, j)] = v * correction;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_rotation_diagonalizes_2x2_symmetric() {
        let mut m = vec![CMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 1.0]])];
        let mut u = CMatrix::identity(2);
        let outcome = jacobi_drive(&mut m, &mut u, 10);
        assert!(outcome.converged);
        assert!(m[0].off_diagonal_norm() < 1e-14);
        // eigenvalues (3 +- sqrt(5))/2
        let lo = (3.0 - 5.0f64.sqrt()) / 2.0;
        let hi = (3.0 + 5.0f64.sqrt()) / 2.0;
        let mut d: Vec<f64> = m[0].diagonal_entries().iter().map(|z| z.re).collect();
        d.sort_by(f64::total_cmp);
        assert!((d[0] - lo).abs() < 1e-14);
        assert!((d[1] - hi).abs() < 1e-14);
        // u is unitary
        let id = &u.adjoint() * &u;
        assert!(id.distance(&CMatrix::identity(2)) < 1e-14);
    }

    #[test]
    fn complex_hermitian_pair() {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let m0 = CMatrix::new(2, 2, vec![2.0 * one, 3.0 * i, -3.0 * i, one]).unwrap();
        let mut m = vec![m0.clone()];
        let mut u = CMatrix::identity(2);
        jacobi_drive(&mut m, &mut u, 20);
        assert!(m[0].off_diagonal_norm() < 1e-13);
        let recon = &(&u * &m[0]) * &u.adjoint();
        assert!(recon.distance(&m0) < 1e-13);
    }

    #[test]
    fn sym3_dominant_on_diagonal_matrix() {
        let w = sym3_dominant_eigenvector([[1.0, 0.0, 0.0], [0.0, 5.0, 0.0], [0.0, 0.0, 2.0]]);
        assert!((w[1].abs() - 1.0).abs() < 1e-12);
        assert!(w[0].abs() < 1e-12);
        let z = sym3_dominant_eigenvector([[0.0; 3]; 3]);
        assert_eq!(z, [1.0, 0.0, 0.0]);
    }
}
