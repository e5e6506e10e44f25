//! Small dense helpers for fixed-size matrices.

use nalgebra::SMatrix;

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det<const N: usize>(m: &SMatrix<f64, N, N>) -> f64 {
    let mut a = *m;
    let mut det = 1.0;
    for k in 0..N {
        let p = (k..N)
            .max_by(|&i, &j| a[(i, k)].abs().total_cmp(&a[(j, k)].abs()))
            .unwrap_or(k);
        if a[(p, k)] == 0.0 {
            return 0.0;
        }
        if p != k {
            a.swap_rows(p, k);
            det = -det;
        }
        det *= a[(k, k)];
        for i in k + 1..N {
            let f = a[(i, k)] / a[(k, k)];
            for j in k..N {
                a[(i, j)] -= f * a[(k, j)];
            }
        }
    }
    det
}

/// Orthogonal factor `Q` of `M = Q R` with `R` upper triangular with positive
/// diagonal (modified Gram–Schmidt with one reorthogonalization pass).
pub fn orthogonal_factor<const N: usize>(m: &SMatrix<f64, N, N>) -> SMatrix<f64, N, N> {
    let mut q = *m;
    for j in 0..N {
        for _ in 0..2 {
            for k in 0..j {
                let d = q.column(k).dot(&q.column(j));
                let ck = q.column(k).into_owned();
                q.column_mut(j).axpy(-d, &ck, 1.0);
            }
        }
        let n = q.column(j).norm();
        q.column_mut(j).unscale_mut(n);
    }
    q
}

/// Completes the first `k` orthonormal columns of `q` to a positively oriented
/// orthonormal basis, by Gram–Schmidt against the standard basis.
pub fn complete_basis<const N: usize>(q: &mut SMatrix<f64, N, N>, k: usize) {
    let mut j = k;
    let mut e = 0;
    while j < N && e < N {
        let mut v = SMatrix::<f64, N, 1>::zeros();
        v[e] = 1.0;
        for _ in 0..2 {
            for c in 0..j {
                let d = q.column(c).dot(&v);
                v.axpy(-d, &q.column(c).into_owned(), 1.0);
            }
        }
        let n = v.norm();
        if n > 0.5 {
            q.set_column(j, &(v / n));
            j += 1;
        }
        e += 1;
    }
    if det(q) < 0.0 {
        q.column_mut(N - 1).neg_mut();
    }
}

pub(crate) fn add_row_multiple<const N: usize>(
    m: &mut SMatrix<f64, N, N>,
    target: usize,
    src: usize,
    c: f64,
) {
    for j in 0..N {
        let x = m[(src, j)];
        m[(target, j)] += c * x;
    }
}

pub(crate) fn add_col_multiple<const N: usize>(
    m: &mut SMatrix<f64, N, N>,
    target: usize,
    src: usize,
    c: f64,
) {
    for i in 0..N {
        let x = m[(i, src)];
        m[(i, target)] += c * x;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix4;

    #[test]
    fn determinant_and_qr() {
        let m = Matrix4::new(
            2.0, 1.0, 0.0, 3.0, -1.0, 4.0, 1.0, 0.0, 0.5, 0.0, -2.0, 1.0, 1.0, 1.0, 1.0, -1.0,
        );
        assert!((det(&m) - m.determinant()).abs() < 1e-12);
        let q = orthogonal_factor(&m);
        assert!((q.transpose() * q - Matrix4::identity()).amax() < 1e-14);
        let r = q.transpose() * m;
        for i in 0..4 {
            assert!(r[(i, i)] > 0.0);
            for j in 0..i {
                assert!(r[(i, j)].abs() < 1e-12);
            }
        }
    }
}
