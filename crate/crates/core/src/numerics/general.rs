//! Eigenvalues of general complex matrices and inverse-iteration
//! eigenvectors.
//!
//! This is the minimum of non-normal machinery the factorization pipeline
//! needs: a similarity transform that makes a conjugated solution hermitian
//! again is found from the eigenvectors of a generic member of the commuting
//! family, and that member is not normal. Eigenvalues come from shifted QR
//! on the Hessenberg form; eigenvectors from inverse iteration against the
//! original matrix.

use num_complex::Complex64;

use super::matrix::CMatrix;
use crate::error::{Error, Result};

fn house_apply_left(a: &mut CMatrix, v: &[Complex64], from_row: usize) {
    // A <- (I - 2 v v*) A restricted to rows [from_row..]
    let m = a.cols();
    for j in 0..m {
        let mut dot = Complex64::new(0.0, 0.0);
        for (k, vk) in v.iter().enumerate() {
            dot += vk.conj() * a[(from_row + k, j)];
        }
        let dot = dot * 2.0;
        for (k, vk) in v.iter().enumerate() {
            let corr = dot * vk;
            a[(from_row + k, j)] -= corr;
        }
    }
}

fn house_apply_right(a: &mut CMatrix, v: &[Complex64], from_col: usize) {
    // A <- A (I - 2 v v*) restricted to columns [from_col..]
    let n = a.rows();
    for i in 0..n {
        let mut dot = Complex64::new(0.0, 0.0);
        for (k, vk) in v.iter().enumerate() {
            dot += a[(i, from_col + k)] * vk;
        }
        let dot = dot * 2.0;
        for (k, vk) in v.iter().enumerate() {
            let corr = dot * vk.conj();
            a[(i, from_col + k)] -= corr;
        }
    }
}

/// Householder reduction to upper Hessenberg form (the transform itself is
/// not accumulated; only eigenvalues are wanted downstream).
fn to_hessenberg(x: &CMatrix) -> CMatrix {
    let n = x.rows();
    let mut h = x.clone();
    for k in 0..n.saturating_sub(2) {
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm <= 1e-300 {
            continue;
        }
        let phase = if v[0].norm() > 0.0 {
            v[0] / v[0].norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        v[0] += phase * norm;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm <= 1e-300 {
            continue;
        }
        for z in &mut v {
            *z /= vnorm;
        }
        house_apply_left(&mut h, &v, k + 1);
        house_apply_right(&mut h, &v, k + 1);
        for i in k + 2..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
    h
}

fn eig2x2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let tr = a + d;
    let disc = ((a - d) * (a - d) + 4.0 * b * c).sqrt();
    ((tr + disc) * 0.5, (tr - disc) * 0.5)
}

/// Eigenvalues of a general square complex matrix, via Wilkinson-shifted QR
/// iteration on the Hessenberg form with Givens rotations.
pub fn general_eigenvalues(x: &CMatrix) -> Result<Vec<Complex64>> {
    if !x.is_square() {
        return Err(Error::InvalidMatrix(
            "eigenvalues of a non-square matrix".into(),
        ));
    }
    let n = x.rows();
    if n == 1 {
        return Ok(vec![x[(0, 0)]]);
    }
    let mut h = to_hessenberg(x);
    let scale = x.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut eigenvalues: Vec<Complex64> = Vec::with_capacity(n);
    let mut hi = n; // active block is h[lo..hi][lo..hi]
    let mut stall = 0usize;
    let mut total_iters = 0usize;
    let max_total = 60 * n;

    while hi > 0 {
        if hi == 1 {
            eigenvalues.push(h[(0, 0)]);
            hi = 0;
            continue;
        }
        // deflate converged subdiagonal entries at the bottom of the block
        let sub = h[(hi - 1, hi - 2)].norm();
        let local = h[(hi - 1, hi - 1)].norm() + h[(hi - 2, hi - 2)].norm();
        if sub <= 1e-15 * (local + scale * 1e-3) {
            eigenvalues.push(h[(hi - 1, hi - 1)]);
            hi -= 1;
            stall = 0;
            continue;
        }
        // find the start of the active block
        let mut lo = hi - 1;
        while lo > 0 {
            let s = h[(lo, lo - 1)].norm();
            let l = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if s <= 1e-15 * (l + scale * 1e-3) {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if hi - lo == 2 {
            let (l1, l2) = eig2x2(
                h[(lo, lo)],
                h[(lo, lo + 1)],
                h[(lo + 1, lo)],
                h[(lo + 1, lo + 1)],
            );
            eigenvalues.push(l1);
            eigenvalues.push(l2);
            hi = lo;
            stall = 0;
            continue;
        }

        total_iters += 1;
        if total_iters > max_total {
            return Err(Error::NonConvergence {
                sweeps: total_iters,
                residual: h[(hi - 1, hi - 2)].norm(),
            });
        }
        stall += 1;
        let shift = if stall.is_multiple_of(16) {
            // exceptional shift to break symmetric stalls
            h[(hi - 1, hi - 1)] + Complex64::new(0.75 * h[(hi - 1, hi - 2)].norm(), 0.0)
        } else {
            let (l1, l2) = eig2x2(
                h[(hi - 2, hi - 2)],
                h[(hi - 2, hi - 1)],
                h[(hi - 1, hi - 2)],
                h[(hi - 1, hi - 1)],
            );
            let target = h[(hi - 1, hi - 1)];
            if (l1 - target).norm() <= (l2 - target).norm() {
                l1
            } else {
                l2
            }
        };

        // explicit shifted QR step on the active block via Givens rotations
        for i in lo..hi {
            h[(i, i)] -= shift;
        }
        let mut rots: Vec<(f64, Complex64)> = Vec::with_capacity(hi - lo - 1);
        for i in lo..hi - 1 {
            let f = h[(i, i)];
            let g = h[(i + 1, i)];
            let r = (f.norm_sqr() + g.norm_sqr()).sqrt();
            let (c, s) = if r <= 1e-300 {
                (1.0, Complex64::new(0.0, 0.0))
            } else {
                let c = f.norm() / r;
                let s = if f.norm() > 0.0 {
                    (f / f.norm()) * g.conj() / r
                } else {
                    Complex64::new(1.0, 0.0) * g.conj() / g.norm()
                };
                (c, s)
            };
            // rows i, i+1: [c, s; -conj(s), c]
            for j in i..hi {
                let (a, b) = (h[(i, j)], h[(i + 1, j)]);
                h[(i, j)] = c * a + s * b;
                h[(i + 1, j)] = -s.conj() * a + c * b;
            }
            rots.push((c, s));
        }
        for (i, (c, s)) in rots.iter().enumerate() {
            let i = lo + i;
            // columns i, i+1: right-multiply by the adjoint rotation
            for r in lo..=(i + 1).min(hi - 1) {
                let (a, b) = (h[(r, i)], h[(r, i + 1)]);
                h[(r, i)] = c * a + s.conj() * b;
                h[(r, i + 1)] = -s * a + c * b;
            }
        }
        for i in lo..hi {
            h[(i, i)] += shift;
        }
    }
    Ok(eigenvalues)
}

/// Solves `A z = b` by partial-pivot LU with pivots floored at
/// `floor` in magnitude, so near-singular systems (the inverse-iteration
/// case) stay solvable and overflow into the null direction is controlled.
pub fn solve_floored(a: &CMatrix, b: &[Complex64], floor: f64) -> Vec<Complex64> {
    let n = a.rows();
    assert!(a.is_square() && b.len() == n, "solve shape mismatch");
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_mag = m[(col, col)].norm();
        for r in col + 1..n {
            if m[(r, col)].norm() > pivot_mag {
                pivot_mag = m[(r, col)].norm();
                pivot_row = r;
            }
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = m[(col, j)];
                m[(col, j)] = m[(pivot_row, j)];
                m[(pivot_row, j)] = tmp;
            }
            rhs.swap(col, pivot_row);
        }
        let mut pivot = m[(col, col)];
        if pivot.norm() < floor {
            pivot = if pivot.norm() > 0.0 {
                pivot / pivot.norm() * floor
            } else {
                Complex64::new(floor, 0.0)
            };
            m[(col, col)] = pivot;
        }
        for r in col + 1..n {
            let factor = m[(r, col)] / pivot;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in col..n {
                let v = m[(col, j)];
                m[(r, j)] -= factor * v;
            }
            let v = rhs[col];
            rhs[r] -= factor * v;
        }
    }
    for col in (0..n).rev() {
        let mut acc = rhs[col];
        for j in col + 1..n {
            acc -= m[(col, j)] * rhs[j];
        }
        rhs[col] = acc / m[(col, col)];
    }
    rhs
}

/// One eigenvector of `a` for the (accurately known) eigenvalue `lambda`,
/// by inverse iteration from the given start vector. Returns a unit vector.
pub fn inverse_iteration(
    a: &CMatrix,
    lambda: Complex64,
    start: &[Complex64],
    iters: usize,
) -> Vec<Complex64> {
    let n = a.rows();
    let shifted = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            a[(i, j)] - lambda
        } else {
            a[(i, j)]
        }
    });
    let floor = 1e-14 * (1.0 + a.frobenius_norm());
    let mut v = start.to_vec();
    normalize(&mut v);
    for _ in 0..iters {
        let mut w = solve_floored(&shifted, &v, floor);
        if w.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            break;
        }
        normalize(&mut w);
        v = w;
    }
    v
}

fn normalize(v: &mut [Complex64]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for z in v {
            *z /= norm;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sort_key(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
        a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
    }

    #[test]
    fn eigenvalues_of_triangular_matrix() {
        let m = CMatrix::from_real_rows(&[&[1.0, 5.0, 2.0], &[0.0, 2.0, -1.0], &[0.0, 0.0, 3.0]]);
        let mut eig = general_eigenvalues(&m).unwrap();
        eig.sort_by(sort_key);
        for (got, want) in eig.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - c(want, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn eigenvalues_of_rotation_matrix_are_complex() {
        // 90-degree rotation has eigenvalues +-i
        let m = CMatrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let mut eig = general_eigenvalues(&m).unwrap();
        eig.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((eig[0] - c(0.0, -1.0)).norm() < 1e-12);
        assert!((eig[1] - c(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn eigenvalues_of_conjugated_diagonal() {
        let mut rng = StdRng::seed_from_u64(11);
        for n in [2usize, 3, 5, 8] {
            let d: Vec<Complex64> = (0..n)
                .map(|k| {
                    c(
                        k as f64 + rng.random_range(-0.2..0.2),
                        rng.random_range(-1.0..1.0),
                    )
                })
                .collect();
            let p = CMatrix::from_fn(n, n, |i, j| {
                c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                    + if i == j { c(3.0, 0.0) } else { c(0.0, 0.0) }
            });
            let pinv = p.gauss_jordan_inverse().unwrap();
            let m = &(&p * &CMatrix::diagonal(&d)) * &pinv;
            let mut eig = general_eigenvalues(&m).unwrap();
            eig.sort_by(sort_key);
            let mut want = d.clone();
            want.sort_by(sort_key);
            for (got, w) in eig.iter().zip(&want) {
                assert!((got - w).norm() < 1e-8, "n={n}: {got} vs {w}");
            }
        }
    }

    #[test]
    fn inverse_iteration_recovers_eigenvector() {
        let m = CMatrix::from_real_rows(&[&[3.0, 1.0], &[0.0, 1.0]]);
        let start = [c(0.7, 0.1), c(0.3, -0.4)];
        let v = inverse_iteration(&m, c(3.0, 0.0), &start, 3);
        // residual || (A - 3I) v ||
        let shifted = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, -2.0]]);
        let res: f64 = shifted
            .matvec(&v)
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(res < 1e-10, "residual {res}");
    }

    #[test]
    fn solve_floored_plain_system() {
        let m = CMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 3.0]]);
        let b = [c(3.0, 0.0), c(4.0, 0.0)];
        let z = solve_floored(&m, &b, 1e-300);
        // solution of [[2,1],[1,3]] x = [3,4] is [1, 1]
        assert!((z[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((z[1] - c(1.0, 0.0)).norm() < 1e-12);
    }
}
