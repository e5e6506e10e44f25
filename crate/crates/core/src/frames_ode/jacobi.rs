use nalgebra::SMatrix;

use crate::error::{Error, Result};
use crate::spin_algebra::{dpi4, ImaginaryQuaternion};

/// Tridiagonal skew matrix with subdiagonal `c` (`c.len() = N − 1`).
pub fn tridiag<const N: usize>(c: &[f64]) -> SMatrix<f64, N, N> {
    assert_eq!(c.len() + 1, N, "subdiagonal length must be N - 1");
    let mut m = SMatrix::<f64, N, N>::zeros();
    for (i, &x) in c.iter().enumerate() {
        m[(i + 1, i)] = x;
        m[(i, i + 1)] = -x;
    }
    m
}

/// Tridiagonal skew-symmetric matrix, stored by its subdiagonal `c₁, …, c_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiMatrix {
    pub c: Vec<f64>,
}

impl JacobiMatrix {
    pub fn new(c: Vec<f64>) -> Result<Self> {
        if !(c.len() == 2 || c.len() == 3) {
            return Err(Error::Shape(format!(
                "expected 2 or 3 subdiagonal entries, got {}",
                c.len()
            )));
        }
        Ok(Self { c })
    }

    /// Reads a skew matrix, rejecting entries off the tridiagonal band above `tol`.
    pub fn from_matrix<const N: usize>(m: &SMatrix<f64, N, N>, tol: f64) -> Result<Self> {
        for i in 0..N {
            for j in 0..N {
                let banded = i.abs_diff(j) == 1;
                if (m[(i, j)] + m[(j, i)]).abs() > tol || (!banded && m[(i, j)].abs() > tol) {
                    return Err(Error::InvalidParameter(format!(
                        "entry ({i}, {j}) breaks the tridiagonal skew form"
                    )));
                }
            }
        }
        Self::new(
            (0..N - 1)
                .map(|i| (m[(i + 1, i)] - m[(i, i + 1)]) / 2.0)
                .collect(),
        )
    }

    pub fn to_matrix<const N: usize>(&self) -> SMatrix<f64, N, N> {
        tridiag(&self.c)
    }

    /// All subdiagonal entries positive.
    pub fn is_jacobi(&self) -> bool {
        self.c.iter().all(|&x| x > 0.0)
    }

    /// All but the last subdiagonal entry positive.
    pub fn is_quasi_jacobi(&self) -> bool {
        self.c[..self.c.len() - 1].iter().all(|&x| x > 0.0)
    }
}

/// A pair `(b_l𝐢 + d𝐤, b_r𝐢 + d𝐤)` of imaginary quaternions with shared `𝐤`-part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImTangentPair {
    pub b_l: f64,
    pub b_r: f64,
    pub d: f64,
}

impl ImTangentPair {
    pub fn new(b_l: f64, b_r: f64, d: f64) -> Self {
        Self { b_l, b_r, d }
    }

    /// `(b_l, b_r, d)` for speed `v`, curvature `κ` and torsion `τ`.
    pub fn from_profile(v: f64, kappa: f64, tau: f64) -> Self {
        Self::new(
            v * (tau + 1.0) / 2.0,
            v * (tau - 1.0) / 2.0,
            v * kappa / 2.0,
        )
    }

    pub fn left(&self) -> ImaginaryQuaternion {
        ImaginaryQuaternion::new(self.b_l, 0.0, self.d)
    }

    pub fn right(&self) -> ImaginaryQuaternion {
        ImaginaryQuaternion::new(self.b_r, 0.0, self.d)
    }

    /// `b_l > b_r` and `d > 0`.
    pub fn is_quasi_jacobi(&self) -> bool {
        self.b_l > self.b_r && self.d > 0.0
    }

    /// `b_l > |b_r|` and `d > 0`.
    pub fn is_jacobi(&self) -> bool {
        self.b_l > self.b_r.abs() && self.d > 0.0
    }

    /// Image under `DΠ₄`: `tridiag(b_l − b_r, 2d, b_l + b_r)`.
    pub fn to_matrix(&self) -> SMatrix<f64, 4, 4> {
        dpi4(&self.left(), &self.right())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn pair_maps_to_tridiagonal(b_l in -3.0f64..3.0, b_r in -3.0f64..3.0, d in -3.0f64..3.0) {
            let p = ImTangentPair::new(b_l, b_r, d);
            let m = p.to_matrix();
            let j = JacobiMatrix::from_matrix(&m, 0.0).unwrap();
            prop_assert!((j.c[0] - (b_l - b_r)).abs() < 1e-15);
            prop_assert!((j.c[1] - 2.0 * d).abs() < 1e-15);
            prop_assert!((j.c[2] - (b_l + b_r)).abs() < 1e-15);
            prop_assert_eq!(p.is_quasi_jacobi(), j.is_quasi_jacobi());
            prop_assert_eq!(p.is_jacobi(), j.is_jacobi());
        }
    }
}
