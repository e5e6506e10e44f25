//! Signed permutations and Bruhat cells of `SO₃`, `SO₄` and their spin covers.

use std::fmt;

use nalgebra::SMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::config::Tolerances;
use crate::error::{Error, Result};
pub use crate::linalg::orthogonal_factor;
use crate::linalg::{add_col_multiple, add_row_multiple, det};
use crate::spin_algebra::{check_special_orthogonal_within, SpinCover};

/// A signed permutation matrix `P` with `P e_j = signs[j] · e_{perm[j]}` (zero based).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedPermutation {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl SignedPermutation {
    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        let n = perm.len();
        if signs.len() != n {
            return Err(Error::Shape(format!(
                "{} images but {} signs",
                n,
                signs.len()
            )));
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidParameter(format!(
                    "{perm:?} is not a permutation"
                )));
            }
            seen[p] = true;
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidParameter(format!(
                "signs {signs:?} must be ±1"
            )));
        }
        Ok(Self { perm, signs })
    }

    pub fn identity(size: usize) -> Self {
        Self {
            perm: (0..size).collect(),
            signs: vec![1; size],
        }
    }

    /// The order-reversing permutation `ρ(i) = n + 2 − i`, all signs positive.
    pub fn reversal(size: usize) -> Self {
        Self {
            perm: (0..size).rev().collect(),
            signs: vec![1; size],
        }
    }

    /// Reads a matrix whose entries are all within `tol` of `0` or `±1`.
    pub fn from_matrix<const N: usize>(m: &SMatrix<f64, N, N>, tol: f64) -> Result<Self> {
        let mut perm = Vec::with_capacity(N);
        let mut signs = Vec::with_capacity(N);
        for j in 0..N {
            let mut hit = None;
            for i in 0..N {
                let x = m[(i, j)];
                if (x.abs() - 1.0).abs() <= tol {
                    if hit.is_some() {
                        return Err(Error::InvalidParameter(
                            "not a signed permutation matrix".into(),
                        ));
                    }
                    hit = Some((i, x.signum() as i8));
                } else if x.abs() > tol {
                    return Err(Error::InvalidParameter(
                        "not a signed permutation matrix".into(),
                    ));
                }
            }
            let (i, s) = hit
                .ok_or_else(|| Error::InvalidParameter("not a signed permutation matrix".into()))?;
            perm.push(i);
            signs.push(s);
        }
        Self::new(perm, signs)
    }

    pub fn size(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// Sign of the underlying permutation.
    pub fn parity(&self) -> i8 {
        if self.inv_count() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn det(&self) -> i8 {
        self.signs.iter().product::<i8>() * self.parity()
    }

    /// Number of pairs `i < j` with `π(i) > π(j)`; signs are ignored.
    pub fn inv_count(&self) -> usize {
        inv_count(self)
    }

    pub fn matrix<const N: usize>(&self) -> SMatrix<f64, N, N> {
        assert_eq!(N, self.size(), "matrix size must match permutation size");
        let mut m = SMatrix::<f64, N, N>::zeros();
        for j in 0..N {
            m[(self.perm[j], j)] = f64::from(self.signs[j]);
        }
        m
    }

    pub fn compose(&self, other: &Self) -> Self {
        let perm = other.perm.iter().map(|&j| self.perm[j]).collect();
        let signs = other
            .perm
            .iter()
            .zip(&other.signs)
            .map(|(&j, &s)| s * self.signs[j])
            .collect();
        Self { perm, signs }
    }
}

impl fmt::Display for SignedPermutation {
    /// Column images as signed one-based indices, e.g. `[-4 +3 -2 +1]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (j, (&p, &s)) in self.perm.iter().zip(&self.signs).enumerate() {
            if j > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}{}", if s > 0 { '+' } else { '-' }, p + 1)?;
        }
        write!(f, "]")
    }
}

pub fn inv_count(p: &SignedPermutation) -> usize {
    let n = p.perm.len();
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| p.perm[i] > p.perm[j])
        .count()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// All signed permutation matrices of size `n + 1` with determinant `+1`.
pub fn enumerate_b_plus(n: usize) -> Result<Vec<SignedPermutation>> {
    if !(n == 2 || n == 3) {
        return Err(Error::InvalidParameter(format!(
            "n must be 2 or 3, got {n}"
        )));
    }
    let size = n + 1;
    let mut out = Vec::new();
    for perm in permutations(size) {
        for mask in 0u32..(1 << size) {
            let signs = (0..size)
                .map(|k| if mask >> k & 1 == 1 { -1 } else { 1 })
                .collect();
            let p = SignedPermutation {
                perm: perm.clone(),
                signs,
            };
            if p.det() == 1 {
                out.push(p);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// The Bruhat cell `Bru_P` of `SO_{n+1}`, labelled by its signed permutation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BruhatCellSO {
    pub rep: SignedPermutation,
}

/// Factorization `Q = U · P · W` with `U` unit upper triangular and `W ∈ Up⁺`.
#[derive(Debug, Clone)]
struct Elimination<const N: usize> {
    rep: SignedPermutation,
    u: SMatrix<f64, N, N>,
    w: SMatrix<f64, N, N>,
}

fn eliminate<const N: usize>(q: &SMatrix<f64, N, N>, tol: &Tolerances) -> Result<Elimination<N>> {
    let mut m = *q;
    let mut left = SMatrix::<f64, N, N>::identity();
    let mut right = SMatrix::<f64, N, N>::identity();
    let mut pivoted = [false; N];
    let mut perm = vec![0; N];
    let mut signs = vec![1i8; N];
    for j in 0..N {
        let scale = m.column(j).norm();
        let mut pivot = None;
        for i in (0..N).rev().filter(|&i| !pivoted[i]) {
            let x = m[(i, j)].abs();
            if x > tol.pivot * scale {
                pivot = Some(i);
                break;
            }
            if x > tol.pivot_noise * scale {
                return Err(Error::AmbiguousCell {
                    column: j,
                    value: m[(i, j)],
                });
            }
        }
        let r = pivot.ok_or(Error::AmbiguousCell {
            column: j,
            value: 0.0,
        })?;
        let pv = m[(r, j)];
        for i in 0..N {
            if i == r || pivoted[i] {
                continue;
            }
            if i > r {
                m[(i, j)] = 0.0;
                continue;
            }
            let c = m[(i, j)] / pv;
            if c != 0.0 {
                add_row_multiple(&mut m, i, r, -c);
                add_row_multiple(&mut left, i, r, -c);
            }
        }
        for k in j + 1..N {
            let c = m[(r, k)] / pv;
            if c != 0.0 {
                add_col_multiple(&mut m, k, j, -c);
                add_col_multiple(&mut right, k, j, -c);
            }
        }
        pivoted[r] = true;
        perm[j] = r;
        signs[j] = if pv > 0.0 { 1 } else { -1 };
    }
    let rep = SignedPermutation::new(perm, signs)?;
    // left · Q · right = P · D with D positive diagonal
    let d = SMatrix::<f64, N, N>::from_fn(|i, k| {
        if i == k {
            m[(rep.perm[k], k)].abs()
        } else {
            0.0
        }
    });
    let u = left
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("singular elimination".into()))?;
    let rinv = right
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("singular elimination".into()))?;
    Ok(Elimination {
        rep,
        u,
        w: d * rinv,
    })
}

/// The Bruhat cell containing `Q`, found by positive-pivot elimination.
pub fn classify_so<const N: usize>(q: &SMatrix<f64, N, N>) -> Result<BruhatCellSO> {
    classify_so_with(q, &Tolerances::DEFAULT)
}

pub fn classify_so_with<const N: usize>(
    q: &SMatrix<f64, N, N>,
    tol: &Tolerances,
) -> Result<BruhatCellSO> {
    check_special_orthogonal_within(q, tol.round_trip)?;
    let e = eliminate(q, tol)?;
    if e.rep.det() != 1 {
        return Err(Error::Degenerate(
            "elimination produced a permutation of determinant -1".into(),
        ));
    }
    Ok(BruhatCellSO { rep: e.rep })
}

/// A path `s ↦ Q(s)` inside one Bruhat cell, from `Q(0) = Q` to `Q(1) = P`.
#[derive(Debug, Clone)]
pub struct ReductionPath<const N: usize> {
    rep: SignedPermutation,
    p: SMatrix<f64, N, N>,
    u: SMatrix<f64, N, N>,
    w_diag: SMatrix<f64, N, 1>,
    w_unit: SMatrix<f64, N, N>,
    start: SMatrix<f64, N, N>,
}

impl<const N: usize> ReductionPath<N> {
    pub fn rep(&self) -> &SignedPermutation {
        &self.rep
    }

    /// `Q(s)`, the orthogonal part of `U(s) P W(s)` where the triangular factors
    /// are straight-line homotopies to the identity (diagonal geometrically).
    pub fn at(&self, s: f64) -> SMatrix<f64, N, N> {
        if s <= 0.0 {
            return self.start;
        }
        if s >= 1.0 {
            return self.p;
        }
        let id = SMatrix::<f64, N, N>::identity();
        let u = id + (self.u - id) * (1.0 - s);
        let d = SMatrix::<f64, N, N>::from_diagonal(&self.w_diag.map(|x| x.powf(1.0 - s)));
        let w = d * (id + (self.w_unit - id) * (1.0 - s));
        orthogonal_factor(&(u * self.p * w))
    }

    pub fn samples(&self, count: usize) -> Vec<SMatrix<f64, N, N>> {
        (0..=count)
            .map(|k| self.at(k as f64 / count as f64))
            .collect()
    }
}

pub fn reduction_path<const N: usize>(q: &SMatrix<f64, N, N>) -> Result<ReductionPath<N>> {
    let tol = Tolerances::DEFAULT;
    check_special_orthogonal_within(q, tol.round_trip)?;
    let e = eliminate(q, &tol)?;
    let w_diag = e.w.diagonal();
    let w_unit = SMatrix::<f64, N, N>::from_diagonal(&w_diag.map(|x| 1.0 / x)) * e.w;
    Ok(ReductionPath {
        p: e.rep.matrix(),
        rep: e.rep,
        u: e.u,
        w_diag,
        w_unit,
        start: *q,
    })
}

/// A connected component of the preimage of a Bruhat cell in the spin group,
/// labelled by the lift of its signed permutation reached along the reduction path.
#[derive(Debug, Clone, PartialEq)]
pub struct BruhatCellSpin<S> {
    pub rep_so: SignedPermutation,
    pub lift: S,
}

impl<S> BruhatCellSpin<S> {
    pub fn same_cell<const N: usize>(&self, other: &Self) -> bool
    where
        S: SpinCover<N>,
    {
        self.rep_so == other.rep_so && self.lift.distance(&other.lift) < 1e-6
    }
}

const INITIAL_SAMPLES: usize = 256;
const MAX_SAMPLES: usize = 1 << 16;

/// Lifted Bruhat cell of a spin element.
pub fn classify_spin<const N: usize, S: SpinCover<N>>(z: &S) -> Result<BruhatCellSpin<S>> {
    let tol = Tolerances::DEFAULT;
    let path = reduction_path(&z.project())?;
    let mut count = INITIAL_SAMPLES;
    loop {
        match lift_along(&path, *z, count, tol.lift_jump) {
            Ok(lift) => {
                return Ok(BruhatCellSpin {
                    rep_so: path.rep.clone(),
                    lift,
                })
            }
            Err(jump) if count < MAX_SAMPLES => {
                let _ = jump;
                count *= 2;
            }
            Err(jump) => {
                return Err(Error::LiftJump {
                    samples: count,
                    jump,
                })
            }
        }
    }
}

fn lift_along<const N: usize, S: SpinCover<N>>(
    path: &ReductionPath<N>,
    start: S,
    count: usize,
    max_jump: f64,
) -> std::result::Result<S, f64> {
    let mut prev = start;
    for k in 1..=count {
        let m = path.at(k as f64 / count as f64);
        let next = S::lift(&m, &prev).map_err(|_| f64::INFINITY)?;
        let jump = next.distance(&prev);
        if jump > max_jump {
            return Err(jump);
        }
        prev = next;
    }
    Ok(prev)
}

/// Random upper triangular matrix with positive diagonal.
pub fn random_up_plus<const N: usize, R: Rng + ?Sized>(rng: &mut R) -> SMatrix<f64, N, N> {
    SMatrix::<f64, N, N>::from_fn(|i, j| {
        if i == j {
            rng.sample::<f64, _>(StandardNormal).exp()
        } else if i < j {
            rng.sample(StandardNormal)
        } else {
            0.0
        }
    })
}

/// Haar-random element of `SO_N` (QR of a Gaussian matrix, fixed to determinant one).
pub fn random_rotation<const N: usize, R: Rng + ?Sized>(rng: &mut R) -> SMatrix<f64, N, N> {
    let g = SMatrix::<f64, N, N>::from_fn(|_, _| rng.sample(StandardNormal));
    let mut q = orthogonal_factor(&g);
    if det(&q) < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

/// A random element of `Bru_P`: the orthogonal factor of `U P U′`.
pub fn random_in_cell<const N: usize, R: Rng + ?Sized>(
    p: &SignedPermutation,
    rng: &mut R,
) -> SMatrix<f64, N, N> {
    let m = random_up_plus::<N, R>(rng) * p.matrix::<N>() * random_up_plus::<N, R>(rng);
    orthogonal_factor(&m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_algebra::{pi4, Spin4Element, UnitQuaternion};
    use nalgebra::{Matrix3, Matrix4};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn brute_inv(p: &[usize]) -> usize {
        let mut c = 0;
        for i in 0..p.len() {
            for j in 0..p.len() {
                if i < j && p[i] > p[j] {
                    c += 1;
                }
            }
        }
        c
    }

    #[test]
    fn counts() {
        assert_eq!(enumerate_b_plus(2).unwrap().len(), 24);
        let b4 = enumerate_b_plus(3).unwrap();
        assert_eq!(b4.len(), 192);
        assert!(b4.iter().all(|p| det(&p.matrix::<4>()) == 1.0));
        assert_eq!(SignedPermutation::reversal(4).inv_count(), 6);
        assert_eq!(SignedPermutation::identity(4).inv_count(), 0);
    }

    #[test]
    fn q0_is_its_own_cell() {
        let q0 = Matrix4::from_diagonal(&nalgebra::Vector4::new(-1.0, -1.0, 1.0, 1.0));
        let cell = classify_so(&q0).unwrap();
        assert_eq!(cell.rep.matrix::<4>(), q0);
        assert_eq!(
            classify_so(&Matrix3::<f64>::identity()).unwrap().rep,
            SignedPermutation::identity(3)
        );
    }

    #[test]
    fn boundary_matrix_is_reported() {
        // a rotation by 1e-10 in the (1,2)-plane sits next to the identity cell
        let t: f64 = 1e-10;
        let mut q = Matrix3::identity();
        q[(0, 0)] = t.cos();
        q[(1, 1)] = t.cos();
        q[(1, 0)] = t.sin();
        q[(0, 1)] = -t.sin();
        assert!(matches!(classify_so(&q), Err(Error::AmbiguousCell { .. })));
    }

    #[test]
    fn spin_cells_of_plus_minus() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let q = random_rotation::<4, _>(&mut rng);
        let z = crate::spin_algebra::so4_to_spin(&q, &Spin4Element::IDENTITY).unwrap();
        let a = classify_spin(&z).unwrap();
        let b = classify_spin(&-z).unwrap();
        assert_eq!(a.rep_so, b.rep_so);
        assert!(a.lift.distance(&-b.lift) < 1e-8);
        assert!((pi4(&a.lift) - a.rep_so.matrix::<4>()).amax() < 1e-8);
        let id = classify_spin(&UnitQuaternion::IDENTITY).unwrap();
        assert_eq!(id.lift, UnitQuaternion::IDENTITY);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn inv_count_matches_brute(idx in 0usize..192) {
            let p = &enumerate_b_plus(3).unwrap()[idx];
            prop_assert_eq!(p.inv_count(), brute_inv(p.perm()));
        }

        #[test]
        fn generated_cells_are_recovered(idx in 0usize..192, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = enumerate_b_plus(3).unwrap()[idx].clone();
            let q = random_in_cell::<4, _>(&p, &mut rng);
            prop_assert_eq!(classify_so(&q).unwrap().rep, p);
        }

        #[test]
        fn reduction_path_stays_in_cell(idx in 0usize..24, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = enumerate_b_plus(2).unwrap()[idx].clone();
            let q = random_in_cell::<3, _>(&p, &mut rng);
            let path = reduction_path(&q).unwrap();
            prop_assert!((path.at(0.0) - q).amax() == 0.0);
            prop_assert_eq!(path.at(1.0), p.matrix::<3>());
            for m in path.samples(64) {
                prop_assert_eq!(&classify_so(&m).unwrap().rep, &p);
            }
        }
    }
}
