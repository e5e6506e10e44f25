use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::config::Tolerances;
use crate::error::{Error, Result};

/// A general quaternion `a + b𝐢 + c𝐣 + d𝐤`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Quaternion {
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub fn from_array(v: [f64; 4]) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// The `k`-th basis element of `ℍ` in the order `1, 𝐢, 𝐣, 𝐤`.
    pub fn basis(k: usize) -> Self {
        let mut v = [0.0; 4];
        v[k] = 1.0;
        Self::from_array(v)
    }

    pub fn conj(self) -> Self {
        Self::new(self.a, -self.b, -self.c, -self.d)
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Euclidean inner product on `ℍ ≅ ℝ⁴`.
    pub fn dot(self, o: Self) -> f64 {
        self.a * o.a + self.b * o.b + self.c * o.c + self.d * o.d
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(s * self.a, s * self.b, s * self.c, s * self.d)
    }

    pub fn imaginary(self) -> ImaginaryQuaternion {
        ImaginaryQuaternion::new(self.b, self.c, self.d)
    }
}

/// Hamilton product.
pub fn quat_mul(p: Quaternion, q: Quaternion) -> Quaternion {
    Quaternion::new(
        p.a * q.a - p.b * q.b - p.c * q.c - p.d * q.d,
        p.a * q.b + p.b * q.a + p.c * q.d - p.d * q.c,
        p.a * q.c - p.b * q.d + p.c * q.a + p.d * q.b,
        p.a * q.d + p.b * q.c - p.c * q.b + p.d * q.a,
    )
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, rhs: Quaternion) -> Quaternion {
        quat_mul(self, rhs)
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, rhs: f64) -> Quaternion {
        self.scale(rhs)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        self.scale(-1.0)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:+}i {:+}j {:+}k", self.a, self.b, self.c, self.d)
    }
}

/// A pure imaginary quaternion `b𝐢 + c𝐣 + d𝐤`, an element of the Lie algebra of `Spin₃`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ImaginaryQuaternion {
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl ImaginaryQuaternion {
    pub const ZERO: ImaginaryQuaternion = ImaginaryQuaternion::new(0.0, 0.0, 0.0);

    pub const fn new(b: f64, c: f64, d: f64) -> Self {
        Self { b, c, d }
    }

    pub fn norm(self) -> f64 {
        (self.b * self.b + self.c * self.c + self.d * self.d).sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(s * self.b, s * self.c, s * self.d)
    }

    pub fn to_quaternion(self) -> Quaternion {
        Quaternion::new(0.0, self.b, self.c, self.d)
    }
}

impl Add for ImaginaryQuaternion {
    type Output = ImaginaryQuaternion;
    fn add(self, o: Self) -> Self {
        Self::new(self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl Sub for ImaginaryQuaternion {
    type Output = ImaginaryQuaternion;
    fn sub(self, o: Self) -> Self {
        Self::new(self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

/// A quaternion of unit norm, i.e. a point of `S³ ≅ Spin₃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitQuaternion(Quaternion);

impl UnitQuaternion {
    pub const IDENTITY: UnitQuaternion = UnitQuaternion(Quaternion::ONE);

    /// Validates `|q| = 1` within the rejection tolerance and renormalizes.
    pub fn new(q: Quaternion) -> Result<Self> {
        let n = q.norm();
        if !n.is_finite() || (n - 1.0).abs() > Tolerances::DEFAULT.unit_reject {
            return Err(Error::NotUnit { norm: n });
        }
        Ok(Self(q.scale(1.0 / n)))
    }

    /// Normalizes any nonzero quaternion.
    pub fn normalize(q: Quaternion) -> Result<Self> {
        let n = q.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::Degenerate(format!(
                "cannot normalize quaternion of norm {n}"
            )));
        }
        Ok(Self(q.scale(1.0 / n)))
    }

    /// Caller guarantees `q` is already of unit norm up to rounding.
    pub(crate) fn new_unchecked(q: Quaternion) -> Self {
        Self(q)
    }

    pub fn from_coords(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::new(Quaternion::new(a, b, c, d))
    }

    pub fn quaternion(self) -> Quaternion {
        self.0
    }

    pub fn conj(self) -> Self {
        Self(self.0.conj())
    }

    pub fn inverse(self) -> Self {
        self.conj()
    }

    /// Projects back onto the sphere after accumulated rounding.
    pub fn renormalize(self) -> Self {
        Self(self.0.scale(1.0 / self.0.norm()))
    }

    pub fn distance(&self, o: &Self) -> f64 {
        (self.0 - o.0).norm()
    }
}

impl Mul for UnitQuaternion {
    type Output = UnitQuaternion;
    fn mul(self, rhs: UnitQuaternion) -> UnitQuaternion {
        UnitQuaternion(self.0 * rhs.0)
    }
}

impl Neg for UnitQuaternion {
    type Output = UnitQuaternion;
    fn neg(self) -> UnitQuaternion {
        UnitQuaternion(-self.0)
    }
}

impl fmt::Display for UnitQuaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// An element `(z_l, z_r)` of `Spin₄ ≅ S³ × S³`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spin4Element {
    pub left: UnitQuaternion,
    pub right: UnitQuaternion,
}

impl Spin4Element {
    pub const IDENTITY: Spin4Element = Spin4Element {
        left: UnitQuaternion::IDENTITY,
        right: UnitQuaternion::IDENTITY,
    };

    pub fn new(left: UnitQuaternion, right: UnitQuaternion) -> Self {
        Self { left, right }
    }

    pub fn inverse(self) -> Self {
        Self::new(self.left.conj(), self.right.conj())
    }

    pub fn renormalize(self) -> Self {
        Self::new(self.left.renormalize(), self.right.renormalize())
    }

    /// Product metric `sqrt(|z_l − w_l|² + |z_r − w_r|²)`.
    pub fn distance(&self, o: &Self) -> f64 {
        let l = self.left.distance(&o.left);
        let r = self.right.distance(&o.right);
        (l * l + r * r).sqrt()
    }
}

impl Mul for Spin4Element {
    type Output = Spin4Element;
    fn mul(self, rhs: Spin4Element) -> Spin4Element {
        Spin4Element::new(self.left * rhs.left, self.right * rhs.right)
    }
}

impl Neg for Spin4Element {
    type Output = Spin4Element;
    fn neg(self) -> Spin4Element {
        Spin4Element::new(-self.left, -self.right)
    }
}

impl fmt::Display for Spin4Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.left, self.right)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_relations() {
        let (i, j, k) = (Quaternion::I, Quaternion::J, Quaternion::K);
        assert_eq!(i * j, k);
        assert_eq!(j * k, i);
        assert_eq!(k * i, j);
        assert_eq!(i * i, -Quaternion::ONE);
        assert_eq!(i * j * k, -Quaternion::ONE);
    }

    #[test]
    fn bilinear_expansion() {
        // (1+i)(1+j) = 1 + j + i + ij
        let p = Quaternion::new(1.0, 1.0, 0.0, 0.0);
        let q = Quaternion::new(1.0, 0.0, 1.0, 0.0);
        assert_eq!(p * q, Quaternion::new(1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn rejects_non_unit() {
        assert!(UnitQuaternion::from_coords(1.0, 1e-3, 0.0, 0.0).is_err());
        assert!(UnitQuaternion::from_coords(1.0 + 1e-10, 0.0, 0.0, 0.0).is_ok());
    }
}
