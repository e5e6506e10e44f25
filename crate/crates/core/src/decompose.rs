//! Curves on S³ as pairs of curves on S² with a shared speed.
//!
//! A profile `(v, κ, τ)` on S³ with `κ > 0` corresponds to the pair of S² profiles
//! `(vκ, (τ+1)/κ)` and `(vκ, (τ−1)/κ)`. The pair is stored as a single sampled
//! profile with columns `(v, κ_l, κ_r)`.

use std::sync::Arc;

use crate::curves::{CurvatureProfile2, CurvatureProfile3, Grid, ProfileFn, SampledProfile, Side};
use crate::error::{Error, Result};
use crate::frames_ode::{
    integrate_frame, integrate_spin, FrameCurve4, ImTangentPair, ProfileGenerator,
};
use crate::spin_algebra::{Spin4Element, UnitQuaternion};

/// A shared-speed pair of curves on S², with the final spin frames of both halves.
#[derive(Debug, Clone)]
pub struct CurvePair {
    profile: SampledProfile<3>,
    z_l: UnitQuaternion,
    z_r: UnitQuaternion,
}

impl CurvePair {
    /// Builds a pair from samples of `(v, κ_l, κ_r)`, integrating both halves for
    /// their final lifts.
    pub fn new(profile: SampledProfile<3>) -> Result<Self> {
        let grid = profile.grid();
        let left = half(&profile, 1)?;
        let right = half(&profile, 2)?;
        let z_l = *integrate_spin::<3, UnitQuaternion, _>(&ProfileGenerator(&left), grid)
            .last()
            .expect("grid is nonempty");
        let z_r = *integrate_spin::<3, UnitQuaternion, _>(&ProfileGenerator(&right), grid)
            .last()
            .expect("grid is nonempty");
        Ok(Self { profile, z_l, z_r })
    }

    /// Pairs two S² profiles on the same grid. Their speeds must agree to a
    /// relative `1e−12`.
    pub fn from_halves(left: &CurvatureProfile2, right: &CurvatureProfile2) -> Result<Self> {
        let grid = left.grid();
        if right.grid() != grid {
            return Err(Error::Shape(format!(
                "grids of {} and {} intervals",
                grid.n(),
                right.grid().n()
            )));
        }
        for i in 0..grid.len() {
            let (a, b) = (left.value(i)[0], right.value(i)[0]);
            if (a - b).abs() > 1e-12 * a.abs().max(b.abs()) {
                return Err(Error::ConditionViolated {
                    condition: "shared speed",
                    t: grid.t(i),
                });
            }
        }
        let (kl, kr, v) = (left.kappa(), right.kappa(), left.v());
        let mut p = SampledProfile::from_columns(grid, [&v, &kl, &kr])?;
        let lr: std::collections::BTreeMap<usize, [f64; 2]> = right.left_limits().collect();
        let mut jumps: Vec<usize> = left
            .left_limits()
            .map(|(j, _)| j)
            .chain(lr.keys().copied())
            .collect();
        jumps.sort_unstable();
        jumps.dedup();
        let ll: std::collections::BTreeMap<usize, [f64; 2]> = left.left_limits().collect();
        let limits = jumps
            .into_iter()
            .map(|j| {
                let l = ll.get(&j).copied().unwrap_or(left.value(j));
                let r = lr.get(&j).copied().unwrap_or(right.value(j));
                (j, [l[0], l[1], r[1]])
            })
            .collect();
        p = p.with_left_limits(limits)?;
        if let (Some(l), Some(r)) = (left.source(), right.source()) {
            p = p.with_source(Arc::new(Joined {
                left: l.clone(),
                right: r.clone(),
            }));
        }
        Self::new(p)
    }

    pub fn grid(&self) -> Grid {
        self.profile.grid()
    }

    /// Samples of `(v, κ_l, κ_r)`.
    pub fn profile(&self) -> &SampledProfile<3> {
        &self.profile
    }

    pub fn v(&self) -> Vec<f64> {
        self.profile.column(0)
    }

    pub fn kappa_l(&self) -> Vec<f64> {
        self.profile.column(1)
    }

    pub fn kappa_r(&self) -> Vec<f64> {
        self.profile.column(2)
    }

    /// The locally convex half `(v, κ_l)`.
    pub fn left(&self) -> CurvatureProfile2 {
        half(&self.profile, 1).expect("speeds were validated")
    }

    /// The generic half `(v, κ_r)`.
    pub fn right(&self) -> CurvatureProfile2 {
        half(&self.profile, 2).expect("speeds were validated")
    }

    pub fn z_l(&self) -> UnitQuaternion {
        self.z_l
    }

    pub fn z_r(&self) -> UnitQuaternion {
        self.z_r
    }

    pub fn final_spin(&self) -> Spin4Element {
        Spin4Element::new(self.z_l, self.z_r)
    }

    /// Spin lifts `(z_l(t), z_r(t))` of both halves at every grid point.
    pub fn spin_path(&self) -> Vec<Spin4Element> {
        let grid = self.grid();
        let l = integrate_spin::<3, UnitQuaternion, _>(&ProfileGenerator(self.left()), grid);
        let r = integrate_spin::<3, UnitQuaternion, _>(&ProfileGenerator(self.right()), grid);
        l.into_iter()
            .zip(r)
            .map(|(a, b)| Spin4Element::new(a, b))
            .collect()
    }
}

fn half(p: &SampledProfile<3>, c: usize) -> Result<CurvatureProfile2> {
    p.map(move |x| [x[0], x[c]])
}

struct Joined {
    left: crate::curves::SharedProfile<2>,
    right: crate::curves::SharedProfile<2>,
}

impl ProfileFn<3> for Joined {
    fn eval(&self, t: f64, side: Side) -> [f64; 3] {
        let [v, kl] = self.left.eval(t, side);
        [v, kl, self.right.eval(t, side)[1]]
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.left.breakpoints();
        b.extend(self.right.breakpoints());
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }
}

/// The functions `b_l, b_r, d` with `Λ = DΠ₄(b_l𝐢 + d𝐤, b_r𝐢 + d𝐤)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BbdTriple {
    pub grid: Grid,
    pub b_l: Vec<f64>,
    pub b_r: Vec<f64>,
    pub d: Vec<f64>,
}

impl BbdTriple {
    pub fn pairs(&self) -> Vec<ImTangentPair> {
        (0..self.grid.len())
            .map(|i| ImTangentPair::new(self.b_l[i], self.b_r[i], self.d[i]))
            .collect()
    }
}

fn check_positive_curvature(p: &CurvatureProfile3) -> Result<()> {
    let grid = p.grid();
    let samples = (0..grid.len())
        .map(|i| (i, p.value(i)))
        .chain(p.left_limits());
    for (i, [_, k, _]) in samples {
        if !(k > 0.0) {
            return Err(Error::NonPositiveCurvature {
                t: grid.t(i),
                kappa: k,
            });
        }
    }
    Ok(())
}

/// `b_l = v(τ+1)/2`, `b_r = v(τ−1)/2`, `d = vκ/2`.
pub fn bbd_from_profile(p: &CurvatureProfile3) -> Result<BbdTriple> {
    check_positive_curvature(p)?;
    let (v, k, tau) = (p.v(), p.kappa(), p.tau());
    let n = v.len();
    Ok(BbdTriple {
        grid: p.grid(),
        b_l: (0..n).map(|i| v[i] * (tau[i] + 1.0) / 2.0).collect(),
        b_r: (0..n).map(|i| v[i] * (tau[i] - 1.0) / 2.0).collect(),
        d: (0..n).map(|i| v[i] * k[i] / 2.0).collect(),
    })
}

/// Splits a curve on S³ with `κ > 0` into its left and right curves on S².
pub fn decompose3(p: &CurvatureProfile3) -> Result<CurvePair> {
    check_positive_curvature(p)?;
    let pair = p.map(|[v, k, tau]| [v * k, (tau + 1.0) / k, (tau - 1.0) / k])?;
    CurvePair::new(pair)
}

/// Reassembles the curve on S³ from a pair satisfying condition (G).
pub fn compose3(pair: &CurvePair) -> Result<CurvatureProfile3> {
    let check = check_condition(pair, Condition::G);
    if let Some(t) = check.witness {
        return Err(Error::ConditionViolated { condition: "G", t });
    }
    pair.profile.map(|[v, kl, kr]| {
        let gap = kl - kr;
        [v * gap / 2.0, 2.0 / gap, (kl + kr) / gap]
    })
}

/// The pointwise conditions on a shared-speed pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// `κ_l > κ_r`: the pair comes from a generic curve.
    G,
    /// `κ_l > |κ_r|`: the pair comes from a locally convex curve.
    L,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionCheck {
    pub holds: bool,
    /// First parameter where the inequality fails.
    pub witness: Option<f64>,
}

/// Scans the samples (and left limits at jumps) for the first failure of `which`.
pub fn check_condition(pair: &CurvePair, which: Condition) -> ConditionCheck {
    let grid = pair.grid();
    let p = &pair.profile;
    let mut samples: Vec<(usize, [f64; 3])> = (0..grid.len())
        .map(|i| (i, p.value(i)))
        .chain(p.left_limits())
        .collect();
    samples.sort_by_key(|&(i, _)| i);
    let witness = samples
        .into_iter()
        .find(|&(_, [_, kl, kr])| match which {
            Condition::G => !(kl > kr),
            Condition::L => !(kl > kr.abs()),
        })
        .map(|(i, _)| grid.t(i));
    ConditionCheck {
        holds: witness.is_none(),
        witness,
    }
}

/// The SO₄ frame of the composed curve together with the spin lifts of both halves,
/// for checking that the two constructions agree.
pub fn composed_frame(pair: &CurvePair) -> Result<FrameCurve4> {
    let p = compose3(pair)?;
    Ok(integrate_frame(&ProfileGenerator(&p), pair.grid()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::families::{gamma_family_profile, omega3_profile};
    use crate::curves::{Constant, FnProfile};
    use crate::spin_algebra::{pi4, Quaternion};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn exact3(grid: Grid, value: [f64; 3]) -> CurvatureProfile3 {
        SampledProfile::from_fn(grid, Arc::new(Constant(value))).unwrap()
    }

    fn assert_const(xs: &[f64], x: f64, tol: f64) {
        for y in xs {
            assert!((y - x).abs() <= tol, "{y} vs {x}");
        }
    }

    fn q(x: Quaternion) -> UnitQuaternion {
        UnitQuaternion::new(x).unwrap()
    }

    #[test]
    fn bbd_of_gamma_1_1() {
        let grid = Grid::new(64).unwrap();
        let b = bbd_from_profile(&exact3(grid, gamma_family_profile(1.0).0)).unwrap();
        assert_const(&b.b_l, 3f64.sqrt() * PI / 2.0, 1e-14);
        assert_const(&b.b_r, 0.0, 1e-14);
        assert_const(&b.d, PI / 2.0, 1e-14);
    }

    #[test]
    fn bbd_zero_torsion_is_symmetric() {
        let grid = Grid::new(32).unwrap();
        let b = bbd_from_profile(&exact3(grid, [2.0, 0.7, 0.0])).unwrap();
        for i in 0..grid.len() {
            assert_eq!(b.b_l[i], -b.b_r[i]);
            assert_eq!(b.b_l[i], 1.0);
        }
    }

    #[test]
    fn rejects_nonpositive_curvature() {
        let grid = Grid::new(32).unwrap();
        let p = exact3(grid, [1.0, -0.5, 1.0]);
        assert!(matches!(
            decompose3(&p),
            Err(Error::NonPositiveCurvature { .. })
        ));
        assert!(matches!(
            bbd_from_profile(&p),
            Err(Error::NonPositiveCurvature { .. })
        ));
    }

    #[test]
    fn ground_truth_examples() {
        let grid = Grid::new(1024).unwrap();
        let s3 = 3f64.sqrt();
        let cases = [
            (1.0, [PI, s3], [PI, 0.0], (-Quaternion::ONE, Quaternion::K)),
            (
                2.0,
                [2.0 * PI, s3],
                [2.0 * PI, 0.0],
                (Quaternion::ONE, -Quaternion::ONE),
            ),
            (
                4.0,
                [4.0 * PI, s3],
                [4.0 * PI, 0.0],
                (Quaternion::ONE, Quaternion::ONE),
            ),
        ];
        for (m, l, r, (zl, zr)) in cases {
            let pair = decompose3(&exact3(grid, gamma_family_profile(m).0)).unwrap();
            assert_const(&pair.v(), l[0], 1e-8);
            assert_const(&pair.kappa_l(), l[1], 1e-8);
            assert_const(&pair.kappa_r(), r[1], 1e-8);
            assert!(
                pair.z_l().distance(&q(zl)) < 1e-6,
                "m = {m}: {}",
                pair.z_l()
            );
            assert!(
                pair.z_r().distance(&q(zr)) < 1e-6,
                "m = {m}: {}",
                pair.z_r()
            );
        }
    }

    #[test]
    fn omega3_matches_its_profile() {
        let grid = Grid::new(256).unwrap();
        let a = decompose3(&exact3(grid, omega3_profile().0)).unwrap();
        let b = decompose3(&exact3(grid, gamma_family_profile(4.0).0)).unwrap();
        assert_eq!(a.profile().max_diff(b.profile()), 0.0);
    }

    #[test]
    fn compose_sigma_pair() {
        let grid = Grid::new(64).unwrap();
        let l = SampledProfile::constant(grid, [PI, 3f64.sqrt()]).unwrap();
        let r = SampledProfile::constant(grid, [PI, 0.0]).unwrap();
        let pair = CurvePair::from_halves(&l, &r).unwrap();
        let p = compose3(&pair).unwrap();
        let want = gamma_family_profile(1.0).0;
        for i in 0..grid.len() {
            let x = p.value(i);
            for c in 0..3 {
                assert!((x[c] - want[c]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn opposite_curvatures_give_zero_torsion() {
        let grid = Grid::new(32).unwrap();
        let pair = CurvePair::new(exact3(grid, [1.5, 2.0, -2.0])).unwrap();
        assert!(compose3(&pair).unwrap().tau().iter().all(|&t| t == 0.0));
    }

    #[test]
    fn conditions() {
        let grid = Grid::new(32).unwrap();
        let ok = CurvePair::new(exact3(grid, [PI, 3f64.sqrt(), 0.0])).unwrap();
        assert!(
            check_condition(&ok, Condition::G).holds && check_condition(&ok, Condition::L).holds
        );
        let equal = CurvePair::new(exact3(grid, [1.0, 0.5, 0.5])).unwrap();
        let c = check_condition(&equal, Condition::G);
        assert!(!c.holds);
        assert_eq!(c.witness, Some(0.0));
        assert!(matches!(
            compose3(&equal),
            Err(Error::ConditionViolated { condition: "G", .. })
        ));
        let gl = CurvePair::new(exact3(grid, [1.0, 1.0, -2.0])).unwrap();
        assert!(check_condition(&gl, Condition::G).holds);
        assert!(!check_condition(&gl, Condition::L).holds);
    }

    #[test]
    fn frames_commute() {
        let grid = Grid::new(512).unwrap();
        let p = SampledProfile::from_fn(
            grid,
            Arc::new(FnProfile(|t: f64| {
                [
                    2.0 + (3.0 * t).sin(),
                    1.0 + 0.5 * (5.0 * t).cos(),
                    0.8 + 0.6 * t,
                ]
            })),
        )
        .unwrap();
        let pair = decompose3(&p).unwrap();
        let frames = composed_frame(&pair).unwrap();
        for (z, f) in pair.spin_path().iter().zip(frames.frames()) {
            assert!((pi4(z) - f).amax() < 1e-6);
        }
        assert!(pair.final_spin().distance(&frames.final_spin()) < 1e-6);
    }

    fn profile_strategy() -> impl Strategy<Value = [f64; 9]> {
        prop::array::uniform9(-1.0f64..1.0)
    }

    fn random_profile(c: [f64; 9], grid: Grid) -> CurvatureProfile3 {
        SampledProfile::from_fn(
            grid,
            Arc::new(FnProfile(move |t: f64| {
                [
                    (c[0] + c[1] * (3.0 * t).sin() + c[2] * t).exp(),
                    (c[3] + c[4] * (2.0 * t).cos() + c[5] * t * t).exp(),
                    (c[6] + c[7] * (4.0 * t).sin() + c[8] * t).exp(),
                ]
            })),
        )
        .unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn round_trips(c in profile_strategy()) {
            let grid = Grid::new(64).unwrap();
            let p = random_profile(c, grid);
            let pair = decompose3(&p).unwrap();
            prop_assert!(check_condition(&pair, Condition::L).holds);
            let back = compose3(&pair).unwrap();
            prop_assert!(back.max_diff(&p) < 1e-10);
            let again = decompose3(&back).unwrap();
            prop_assert!(again.profile().max_diff(pair.profile()) < 1e-10);
        }

        #[test]
        fn bbd_relations(c in profile_strategy()) {
            let grid = Grid::new(32).unwrap();
            let p = random_profile(c, grid);
            let b = bbd_from_profile(&p).unwrap();
            let (v, k, tau) = (p.v(), p.kappa(), p.tau());
            for i in 0..grid.len() {
                prop_assert!((b.b_l[i] - b.b_r[i] - v[i]).abs() <= 1e-12 * v[i]);
                prop_assert!((2.0 * b.d[i] - v[i] * k[i]).abs() <= 1e-12 * v[i] * k[i]);
                prop_assert!((b.b_l[i] + b.b_r[i] - v[i] * tau[i]).abs() <= 1e-12 * v[i] * (1.0 + tau[i]));
            }
        }
    }
}
