use std::ops::{Mul, Neg};
use std::sync::OnceLock;

use nalgebra::{Matrix3, Matrix4, SMatrix, SVector, Vector4};

use super::quaternion::{ImaginaryQuaternion, Quaternion, Spin4Element, UnitQuaternion};
use crate::config::Tolerances;
use crate::error::{Error, Result};

pub type RotationMatrix3 = Matrix3<f64>;
pub type RotationMatrix4 = Matrix4<f64>;

/// Checks `QᵀQ = I` and `det Q = 1` within the orthogonality tolerance.
pub fn check_special_orthogonal<const N: usize>(q: &SMatrix<f64, N, N>) -> Result<()> {
    check_special_orthogonal_within(q, Tolerances::DEFAULT.orthogonality)
}

pub fn check_special_orthogonal_within<const N: usize>(
    q: &SMatrix<f64, N, N>,
    tol: f64,
) -> Result<()> {
    let defect = (q.transpose() * q - SMatrix::<f64, N, N>::identity()).amax();
    let det = crate::linalg::det(q);
    if !(defect <= tol && (det - 1.0).abs() <= tol) {
        return Err(Error::NotSpecialOrthogonal { defect, det });
    }
    Ok(())
}

fn pi3_raw(q: Quaternion) -> Matrix3<f64> {
    let Quaternion { a, b, c, d } = q;
    Matrix3::new(
        a * a + b * b - c * c - d * d,
        -2.0 * a * d + 2.0 * b * c,
        2.0 * a * c + 2.0 * b * d,
        2.0 * a * d + 2.0 * b * c,
        a * a - b * b + c * c - d * d,
        -2.0 * a * b + 2.0 * c * d,
        -2.0 * a * c + 2.0 * b * d,
        2.0 * a * b + 2.0 * c * d,
        a * a - b * b - c * c + d * d,
    )
}

/// Bilinear matrix of `q ↦ l q r̄`, valid for arbitrary (not necessarily unit) `l`, `r`.
fn pi4_raw(l: Quaternion, r: Quaternion) -> Matrix4<f64> {
    let (al, bl, cl, dl) = (l.a, l.b, l.c, l.d);
    let (ar, br, cr, dr) = (r.a, r.b, r.c, r.d);
    let c1 = Vector4::new(
        al * ar + bl * br + cl * cr + dl * dr,
        -al * br + bl * ar - cl * dr + dl * cr,
        -al * cr + bl * dr + cl * ar - dl * br,
        -al * dr - bl * cr + cl * br + dl * ar,
    );
    let c2 = Vector4::new(
        al * br - bl * ar - cl * dr + dl * cr,
        al * ar + bl * br - cl * cr - dl * dr,
        al * dr + bl * cr + cl * br + dl * ar,
        -al * cr + bl * dr - cl * ar + dl * br,
    );
    let c3 = Vector4::new(
        al * cr + bl * dr - cl * ar - dl * br,
        -al * dr + bl * cr + cl * br - dl * ar,
        al * ar - bl * br + cl * cr - dl * dr,
        al * br + bl * ar + cl * dr + dl * cr,
    );
    let c4 = Vector4::new(
        al * dr - bl * cr + cl * br - dl * ar,
        al * cr + bl * dr + cl * ar + dl * br,
        -al * br - bl * ar + cl * dr + dl * cr,
        al * ar - bl * br - cl * cr + dl * dr,
    );
    Matrix4::from_columns(&[c1, c2, c3, c4])
}

/// `Π₃(z)`, the rotation `h ↦ z h z̄` of `Im ℍ ≅ ℝ³`.
pub fn pi3(z: &UnitQuaternion) -> RotationMatrix3 {
    pi3_raw(z.quaternion())
}

/// `Π₄(z_l, z_r)`, the rotation `q ↦ z_l q z̄_r` of `ℍ ≅ ℝ⁴`.
pub fn pi4(z: &Spin4Element) -> RotationMatrix4 {
    pi4_raw(z.left.quaternion(), z.right.quaternion())
}

/// Differential of `Π₃` at the identity: `h ↦ (x ↦ h x − x h)`.
pub fn dpi3(h: &ImaginaryQuaternion) -> Matrix3<f64> {
    let (b, c, d) = (h.b, h.c, h.d);
    Matrix3::new(
        0.0,
        -2.0 * d,
        2.0 * c,
        2.0 * d,
        0.0,
        -2.0 * b,
        -2.0 * c,
        2.0 * b,
        0.0,
    )
}

/// Left inverse of [`dpi3`] on skew matrices (the symmetric part is discarded).
pub fn dpi3_inverse(a: &Matrix3<f64>) -> ImaginaryQuaternion {
    let b = (a[(2, 1)] - a[(1, 2)]) / 4.0;
    let c = (a[(0, 2)] - a[(2, 0)]) / 4.0;
    let d = (a[(1, 0)] - a[(0, 1)]) / 4.0;
    ImaginaryQuaternion::new(b, c, d)
}

/// Differential of `Π₄` at the identity: `(h_l, h_r) ↦ (z ↦ h_l z − z h_r)`.
pub fn dpi4(hl: &ImaginaryQuaternion, hr: &ImaginaryQuaternion) -> Matrix4<f64> {
    let (bm, cm, dm) = (hl.b - hr.b, hl.c - hr.c, hl.d - hr.d);
    let (bp, cp, dp) = (hl.b + hr.b, hl.c + hr.c, hl.d + hr.d);
    Matrix4::new(
        0.0, -bm, -cm, -dm, //
        bm, 0.0, -dp, cp, //
        cm, dp, 0.0, -bp, //
        dm, -cp, bp, 0.0,
    )
}

/// Left inverse of [`dpi4`] on skew matrices.
pub fn dpi4_inverse(a: &Matrix4<f64>) -> (ImaginaryQuaternion, ImaginaryQuaternion) {
    let s = |i: usize, j: usize| (a[(i, j)] - a[(j, i)]) / 2.0;
    let (bm, cm, dm) = (s(1, 0), s(2, 0), s(3, 0));
    let (bp, cp, dp) = (s(3, 2), -s(3, 1), s(2, 1));
    (
        ImaginaryQuaternion::new((bp + bm) / 2.0, (cp + cm) / 2.0, (dp + dm) / 2.0),
        ImaginaryQuaternion::new((bp - bm) / 2.0, (cp - cm) / 2.0, (dp - dm) / 2.0),
    )
}

/// `exp(t h) = cos(t|h|) + sin(t|h|) h/|h|`.
pub fn exp_im(h: &ImaginaryQuaternion, t: f64) -> UnitQuaternion {
    let theta = t * h.norm();
    // t·sin(θ)/θ, with the Taylor branch near zero
    let s = if theta.abs() < 1e-8 {
        t * (1.0 - theta * theta / 6.0)
    } else {
        t * theta.sin() / theta
    };
    let q = Quaternion::new(theta.cos(), s * h.b, s * h.c, s * h.d);
    UnitQuaternion::new_unchecked(q).renormalize()
}

fn dominant_eigvec(m: &Matrix4<f64>, start: Vector4<f64>) -> Option<Vector4<f64>> {
    let mut x = start.normalize();
    for _ in 0..200 {
        let y = m * x;
        let n = y.norm();
        if !(n.is_finite() && n > 0.0) {
            return None;
        }
        let y = y / n;
        let delta = (y - x).norm();
        x = y;
        if delta < 1e-12 {
            break;
        }
    }
    Some(x)
}

fn pick_sign<T: Neg<Output = T> + Copy>(z: T, hint_dist: impl Fn(T) -> f64) -> T {
    if hint_dist(-z) < hint_dist(z) {
        -z
    } else {
        z
    }
}

/// Lift of a rotation of `ℝ³` to `Spin₃`, choosing the preimage closest to `hint`.
pub fn so3_to_spin(r: &RotationMatrix3, hint: &UnitQuaternion) -> Result<UnitQuaternion> {
    check_special_orthogonal(r)?;
    let g = |i: usize, j: usize| r[(i - 1, j - 1)];
    let tr = g(1, 1) + g(2, 2) + g(3, 3);
    // z zᵀ read off the entries of Π₃(z)
    let aa = (1.0 + tr) / 4.0;
    let bb = (1.0 + g(1, 1) - g(2, 2) - g(3, 3)) / 4.0;
    let cc = (1.0 - g(1, 1) + g(2, 2) - g(3, 3)) / 4.0;
    let dd = (1.0 - g(1, 1) - g(2, 2) + g(3, 3)) / 4.0;
    let ab = (g(3, 2) - g(2, 3)) / 4.0;
    let ac = (g(1, 3) - g(3, 1)) / 4.0;
    let ad = (g(2, 1) - g(1, 2)) / 4.0;
    let bc = (g(1, 2) + g(2, 1)) / 4.0;
    let bd = (g(1, 3) + g(3, 1)) / 4.0;
    let cd = (g(2, 3) + g(3, 2)) / 4.0;
    let m = Matrix4::new(
        aa, ab, ac, ad, ab, bb, bc, bd, ac, bc, cc, cd, ad, bd, cd, dd,
    );
    let k = (0..4)
        .max_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]))
        .unwrap_or(0);
    let v = dominant_eigvec(&m, m.column(k).into_owned())
        .ok_or_else(|| Error::Degenerate("rank-one extraction in Spin₃ lift".into()))?;
    let z = UnitQuaternion::normalize(Quaternion::new(v[0], v[1], v[2], v[3]))?;
    let z = pick_sign(z, |w| w.distance(hint));
    let residual = (pi3(&z) - r).amax();
    if residual > Tolerances::DEFAULT.round_trip {
        return Err(Error::Construction {
            reason: "Spin₃ lift does not reproduce R".into(),
            residual,
        });
    }
    Ok(z)
}

/// Inverse of the constant map `vec(z_l z_rᵀ) ↦ vec(Π₄(z_l, z_r))` (column-major `vec`).
fn pi4_coefficients_inverse() -> &'static SMatrix<f64, 16, 16> {
    static INV: OnceLock<SMatrix<f64, 16, 16>> = OnceLock::new();
    INV.get_or_init(|| {
        let mut t = SMatrix::<f64, 16, 16>::zeros();
        for p in 0..4 {
            for q in 0..4 {
                let m = pi4_raw(Quaternion::basis(p), Quaternion::basis(q));
                // outer(z_l, z_r)[(p, q)] sits at column-major index p + 4q
                t.set_column(
                    p + 4 * q,
                    &SVector::<f64, 16>::from_column_slice(m.as_slice()),
                );
            }
        }
        t.try_inverse()
            .expect("coefficient matrix of Π₄ is invertible")
    })
}

/// Lift of a rotation of `ℝ⁴` to `Spin₄ ≅ S³×S³`, choosing the preimage closest to `hint`.
pub fn so4_to_spin(r: &RotationMatrix4, hint: &Spin4Element) -> Result<Spin4Element> {
    check_special_orthogonal(r)?;
    let vec_r = SVector::<f64, 16>::from_column_slice(r.as_slice());
    let outer = Matrix4::from_column_slice((pi4_coefficients_inverse() * vec_r).as_slice());
    let mmt = outer * outer.transpose();
    let k = (0..4)
        .max_by(|&i, &j| mmt[(i, i)].total_cmp(&mmt[(j, j)]))
        .unwrap_or(0);
    let degenerate = || Error::Degenerate("rank-one extraction in Spin₄ lift".into());
    let zl = dominant_eigvec(&mmt, mmt.column(k).into_owned()).ok_or_else(degenerate)?;
    let zr = outer.transpose() * zl;
    let left = UnitQuaternion::normalize(Quaternion::new(zl[0], zl[1], zl[2], zl[3]))?;
    let right = UnitQuaternion::normalize(Quaternion::new(zr[0], zr[1], zr[2], zr[3]))?;
    let z = pick_sign(Spin4Element::new(left, right), |w| w.distance(hint));
    let residual = (pi4(&z) - r).amax();
    if residual > Tolerances::DEFAULT.round_trip {
        return Err(Error::Construction {
            reason: "Spin₄ lift does not reproduce R".into(),
            residual,
        });
    }
    Ok(z)
}

/// A spin group together with its covering map onto `SO_N`.
pub trait SpinCover<const N: usize>: Copy + Mul<Output = Self> + Neg<Output = Self> {
    fn identity() -> Self;
    fn project(&self) -> SMatrix<f64, N, N>;
    fn lift(r: &SMatrix<f64, N, N>, hint: &Self) -> Result<Self>;
    fn distance(&self, other: &Self) -> f64;
    fn renormalize(self) -> Self;
    fn inverse(self) -> Self;
    /// One RK4 step of `z' = z · DΠ⁻¹(A(t))` given `A` at the start, midpoint and end.
    fn rk4_step(
        self,
        a0: &SMatrix<f64, N, N>,
        am: &SMatrix<f64, N, N>,
        a1: &SMatrix<f64, N, N>,
        dt: f64,
    ) -> Self;
}

fn rk4_quat(z: Quaternion, h0: Quaternion, hm: Quaternion, h1: Quaternion, dt: f64) -> Quaternion {
    let k1 = z * h0;
    let k2 = (z + k1.scale(dt / 2.0)) * hm;
    let k3 = (z + k2.scale(dt / 2.0)) * hm;
    let k4 = (z + k3.scale(dt)) * h1;
    z + (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(dt / 6.0)
}

impl SpinCover<3> for UnitQuaternion {
    fn identity() -> Self {
        UnitQuaternion::IDENTITY
    }
    fn project(&self) -> Matrix3<f64> {
        pi3(self)
    }
    fn lift(r: &Matrix3<f64>, hint: &Self) -> Result<Self> {
        so3_to_spin(r, hint)
    }
    fn distance(&self, other: &Self) -> f64 {
        UnitQuaternion::distance(self, other)
    }
    fn renormalize(self) -> Self {
        UnitQuaternion::renormalize(self)
    }
    fn inverse(self) -> Self {
        self.conj()
    }
    fn rk4_step(self, a0: &Matrix3<f64>, am: &Matrix3<f64>, a1: &Matrix3<f64>, dt: f64) -> Self {
        let h = |a: &Matrix3<f64>| dpi3_inverse(a).to_quaternion();
        let z = rk4_quat(self.quaternion(), h(a0), h(am), h(a1), dt);
        UnitQuaternion::new_unchecked(z).renormalize()
    }
}

impl SpinCover<4> for Spin4Element {
    fn identity() -> Self {
        Spin4Element::IDENTITY
    }
    fn project(&self) -> Matrix4<f64> {
        pi4(self)
    }
    fn lift(r: &Matrix4<f64>, hint: &Self) -> Result<Self> {
        so4_to_spin(r, hint)
    }
    fn distance(&self, other: &Self) -> f64 {
        Spin4Element::distance(self, other)
    }
    fn renormalize(self) -> Self {
        Spin4Element::renormalize(self)
    }
    fn inverse(self) -> Self {
        Spin4Element::inverse(self)
    }
    fn rk4_step(self, a0: &Matrix4<f64>, am: &Matrix4<f64>, a1: &Matrix4<f64>, dt: f64) -> Self {
        let (l0, r0) = dpi4_inverse(a0);
        let (lm, rm) = dpi4_inverse(am);
        let (l1, r1) = dpi4_inverse(a1);
        let q = |h: ImaginaryQuaternion| h.to_quaternion();
        let left = rk4_quat(self.left.quaternion(), q(l0), q(lm), q(l1), dt);
        let right = rk4_quat(self.right.quaternion(), q(r0), q(rm), q(r1), dt);
        Spin4Element::new(
            UnitQuaternion::new_unchecked(left).renormalize(),
            UnitQuaternion::new_unchecked(right).renormalize(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    // Independent oracle: the matrix of x ↦ l x r̄ assembled column by column from the Hamilton product.
    fn conj_matrix4(l: Quaternion, r: Quaternion) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        for j in 0..4 {
            let img = l * Quaternion::basis(j) * r.conj();
            m.set_column(j, &Vector4::from(img.to_array()));
        }
        m
    }

    fn conj_matrix3(z: Quaternion) -> Matrix3<f64> {
        let mut m = Matrix3::zeros();
        for j in 0..3 {
            let img = z * Quaternion::basis(j + 1) * z.conj();
            m.set_column(j, &nalgebra::Vector3::new(img.b, img.c, img.d));
        }
        m
    }

    fn unit() -> impl Strategy<Value = UnitQuaternion> {
        prop::array::uniform4(-1.0f64..1.0)
            .prop_filter("away from zero", |v| {
                v.iter().map(|x| x * x).sum::<f64>() > 1e-2
            })
            .prop_map(|v| UnitQuaternion::normalize(Quaternion::from_array(v)).unwrap())
    }

    fn imag() -> impl Strategy<Value = ImaginaryQuaternion> {
        prop::array::uniform3(-2.0f64..2.0).prop_map(|v| ImaginaryQuaternion::new(v[0], v[1], v[2]))
    }

    #[test]
    fn pi3_of_k() {
        let k = UnitQuaternion::from_coords(0.0, 0.0, 0.0, 1.0).unwrap();
        assert_relative_eq!(
            pi3(&k),
            Matrix3::from_diagonal(&nalgebra::Vector3::new(-1.0, -1.0, 1.0))
        );
    }

    #[test]
    fn pi4_of_i_i_fixes_one() {
        let i = UnitQuaternion::from_coords(0.0, 1.0, 0.0, 0.0).unwrap();
        let m = pi4(&Spin4Element::new(i, i));
        assert_relative_eq!(m.column(0).into_owned(), Vector4::new(1.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn dpi4_tridiagonal_example() {
        let (bl, br, d) = (0.7, -0.3, 1.1);
        let m = dpi4(
            &ImaginaryQuaternion::new(bl, 0.0, d),
            &ImaginaryQuaternion::new(br, 0.0, d),
        );
        assert_relative_eq!(m[(1, 0)], bl - br);
        assert_relative_eq!(m[(2, 1)], 2.0 * d);
        assert_relative_eq!(m[(3, 2)], bl + br);
        assert_eq!((m[(2, 0)], m[(3, 0)], m[(3, 1)]), (0.0, 0.0, 0.0));
    }

    #[test]
    fn exp_im_examples() {
        use std::f64::consts::PI;
        let h = ImaginaryQuaternion::new(0.0, 0.0, PI);
        assert_relative_eq!(exp_im(&h, 1.0).quaternion().a, -1.0, epsilon = 1e-15);
        let h = ImaginaryQuaternion::new(3f64.sqrt() * PI / 2.0, 0.0, PI / 2.0);
        assert!(exp_im(&h, 1.0).distance(&-UnitQuaternion::IDENTITY) < 1e-15);
        assert_eq!(exp_im(&h, 0.0), UnitQuaternion::IDENTITY);
        assert_eq!(
            exp_im(&ImaginaryQuaternion::ZERO, 3.0),
            UnitQuaternion::IDENTITY
        );
    }

    #[test]
    fn coefficient_matrix_inverts() {
        let t = pi4_coefficients_inverse();
        assert!(t.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn lifts_of_identity() {
        let z = so4_to_spin(&Matrix4::identity(), &Spin4Element::IDENTITY).unwrap();
        assert!(z.distance(&Spin4Element::IDENTITY) < 1e-14);
        let z = so3_to_spin(&Matrix3::identity(), &UnitQuaternion::IDENTITY).unwrap();
        assert!(z.distance(&UnitQuaternion::IDENTITY) < 1e-14);
    }

    #[test]
    fn lift_rejects_non_rotation() {
        let mut m = Matrix4::identity();
        m[(0, 0)] = -1.0;
        assert!(matches!(
            so4_to_spin(&m, &Spin4Element::IDENTITY),
            Err(Error::NotSpecialOrthogonal { .. })
        ));
    }

    proptest! {
        #[test]
        fn pi3_matches_conjugation(z in unit()) {
            prop_assert!((pi3(&z) - conj_matrix3(z.quaternion())).amax() < 1e-12);
            prop_assert!(check_special_orthogonal(&pi3(&z)).is_ok());
        }

        #[test]
        fn pi4_matches_conjugation(l in unit(), r in unit()) {
            let m = pi4(&Spin4Element::new(l, r));
            prop_assert!((m - conj_matrix4(l.quaternion(), r.quaternion())).amax() < 1e-12);
            prop_assert!(check_special_orthogonal(&m).is_ok());
            prop_assert_eq!(m, pi4(&Spin4Element::new(-l, -r)));
        }

        #[test]
        fn homomorphisms(z in unit(), w in unit(), l in unit(), r in unit()) {
            prop_assert!((pi3(&(z * w)) - pi3(&z) * pi3(&w)).amax() < 1e-10);
            let a = Spin4Element::new(z, w);
            let b = Spin4Element::new(l, r);
            prop_assert!((pi4(&(a * b)) - pi4(&a) * pi4(&b)).amax() < 1e-10);
        }

        #[test]
        fn dpi3_is_derivative(h in imag()) {
            let eps = 1e-6;
            let fd = (pi3(&exp_im(&h, eps)) - Matrix3::identity()) / eps;
            prop_assert!((fd - dpi3(&h)).amax() < 1e-4);
            let back = dpi3_inverse(&dpi3(&h));
            prop_assert!((back - h).norm() < 1e-14);
        }

        #[test]
        fn dpi4_is_derivative(hl in imag(), hr in imag()) {
            let eps = 1e-6;
            let z = Spin4Element::new(exp_im(&hl, eps), exp_im(&hr, eps));
            let fd = (pi4(&z) - Matrix4::identity()) / eps;
            let m = dpi4(&hl, &hr);
            prop_assert!((fd - m).amax() < 1e-4);
            prop_assert!((m + m.transpose()).amax() == 0.0);
            let (bl, br) = dpi4_inverse(&m);
            prop_assert!((bl - hl).norm() < 1e-14 && (br - hr).norm() < 1e-14);
        }

        #[test]
        fn dpi4_tridiagonal_iff_jacobi_pair(hl in imag(), hr in imag(), pick in 0usize..3) {
            let (hl, hr) = match pick {
                0 => (hl, hr),
                1 => (ImaginaryQuaternion::new(hl.b, 0.0, hl.d), ImaginaryQuaternion::new(hr.b, 0.0, hl.d)),
                _ => (ImaginaryQuaternion::new(hl.b, 0.0, hl.d), ImaginaryQuaternion::new(hr.b, 0.0, hr.d)),
            };
            let m = dpi4(&hl, &hr);
            let tri = m[(2, 0)] == 0.0 && m[(3, 0)] == 0.0 && m[(3, 1)] == 0.0;
            let pair = hl.c == 0.0 && hr.c == 0.0 && hl.d == hr.d;
            prop_assert_eq!(tri, pair);
        }

        #[test]
        fn spin4_lift_round_trip(l in unit(), r in unit()) {
            let z = Spin4Element::new(l, r);
            let m = pi4(&z);
            prop_assert!(so4_to_spin(&m, &z).unwrap().distance(&z) < 1e-8);
            prop_assert!(so4_to_spin(&m, &-z).unwrap().distance(&-z) < 1e-8);
        }

        #[test]
        fn spin3_lift_round_trip(z in unit()) {
            let m = pi3(&z);
            prop_assert!(so3_to_spin(&m, &z).unwrap().distance(&z) < 1e-8);
            prop_assert!(so3_to_spin(&m, &-z).unwrap().distance(&-z) < 1e-8);
        }
    }
}
