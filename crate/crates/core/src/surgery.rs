//! Surgeries on curves given by their curvature profiles: adding loops, the
//! tangent-circle modification of a convex arc, the `#` operation on shared-speed
//! pairs and relaxation-reflection.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{Matrix3, Matrix4, Vector3};

use crate::bruhat::{classify_spin, BruhatCellSpin, SignedPermutation};
use crate::curves::families::{omega3_profile, sigma_profile};
use crate::curves::{
    Constant, CurvatureProfile2, Grid, PiecewiseProfile, ProfileFn, Reparametrized, SampledProfile,
    SharedProfile, Side,
};
use crate::decompose::{check_condition, Condition, CurvePair};
use crate::error::{Error, Result};
use crate::frames_ode::{integrate_frame, FrameCurve3, FrameCurve4, ProfileGenerator};
use crate::spin_algebra::{
    exp_im, pi4, ImaginaryQuaternion, Quaternion, Spin4Element, UnitQuaternion,
};

/// Default half-width of an inserted block.
pub const DEFAULT_EPSILON: f64 = 1.0 / 32.0;

/// Steps used when a surgery integrates a piece of curve for its frame.
const FRAME_STEPS: usize = 4096;

/// Where and what to insert with [`add_loops`].
#[derive(Clone)]
pub struct SurgerySpec<const C: usize> {
    pub t0: f64,
    pub epsilon: f64,
    /// Profile of a closed curve with initial and final frame `I`.
    pub omega: SharedProfile<C>,
}

impl SurgerySpec<2> {
    /// Inserts `σ_π²` on S².
    pub fn sphere2(t0: f64) -> Self {
        let omega = sigma_profile(PI, 2.0).expect("c = π is admissible");
        Self {
            t0,
            epsilon: DEFAULT_EPSILON,
            omega: Arc::new(omega),
        }
    }
}

impl SurgerySpec<3> {
    /// Inserts `ω₃` on S³.
    pub fn sphere3(t0: f64) -> Self {
        Self {
            t0,
            epsilon: DEFAULT_EPSILON,
            omega: Arc::new(omega3_profile()),
        }
    }
}

impl<const C: usize> SurgerySpec<C> {
    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_omega(mut self, omega: SharedProfile<C>) -> Self {
        self.omega = omega;
        self
    }
}

/// Views a `C`-column profile as a `D`-column one; only used with `C == D`.
struct Cast<const C: usize>(SharedProfile<C>);

impl<const C: usize, const D: usize> ProfileFn<D> for Cast<C> {
    fn eval(&self, t: f64, side: Side) -> [f64; D] {
        let x = self.0.eval(t, side);
        std::array::from_fn(|i| x[i])
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.0.breakpoints()
    }
}

/// Max-norm distance of the final Frenet frame of the profile from `I`.
fn final_frame_defect<const C: usize>(p: &SharedProfile<C>) -> Result<f64> {
    let grid = Grid::new(FRAME_STEPS)?;
    let cast = Cast(p.clone());
    match C {
        2 => {
            let f: FrameCurve3 = integrate_frame(&ProfileGenerator(&cast), grid);
            Ok((f.final_frame() - Matrix3::identity()).amax())
        }
        3 => {
            let f: FrameCurve4 = integrate_frame(&ProfileGenerator(&cast), grid);
            Ok((f.final_frame() - Matrix4::identity()).amax())
        }
        _ => Err(Error::InvalidParameter(format!(
            "profiles with {C} columns describe no sphere curve"
        ))),
    }
}

/// Inserts the closed curve `spec.omega` into `γ` at `spec.t0`.
///
/// Outside `[t0 − 2ε, t0 + 2ε]` the result is `γ`; on the two outer quarters of the
/// window `γ` runs at double speed to make room, and the middle half carries
/// `ω` rescaled to `[t0 − ε, t0 + ε]`. At `t0 = 0` and `t0 = 1` the block sits at the
/// corresponding end.
pub fn add_loops<const C: usize>(
    gamma: SharedProfile<C>,
    spec: &SurgerySpec<C>,
) -> Result<PiecewiseProfile<C>> {
    let (t0, e) = (spec.t0, spec.epsilon);
    if !(0.0..=1.0).contains(&t0) {
        return Err(Error::InvalidParameter(format!(
            "insertion time {t0} is outside [0, 1]"
        )));
    }
    if !(e > 0.0) {
        return Err(Error::InvalidParameter(format!("ε = {e} must be positive")));
    }
    let defect = final_frame_defect(&spec.omega)?;
    if defect > 1e-6 {
        return Err(Error::Construction {
            reason: "the inserted curve does not return to the identity frame".into(),
            residual: defect,
        });
    }
    let w = spec.omega.clone();
    let rep = |p: &SharedProfile<C>, offset: f64, rate: f64| -> SharedProfile<C> {
        Arc::new(Reparametrized::new(p.clone(), offset, rate))
    };
    let (knots, pieces) = if t0 == 0.0 {
        check_window(2.0 * e <= 1.0, t0, e)?;
        (
            vec![0.0, e, 2.0 * e, 1.0],
            vec![rep(&w, 0.0, 1.0 / e), rep(&gamma, -2.0 * e, 2.0), gamma],
        )
    } else if t0 == 1.0 {
        check_window(2.0 * e <= 1.0, t0, e)?;
        (
            vec![0.0, 1.0 - 2.0 * e, 1.0 - e, 1.0],
            vec![
                gamma.clone(),
                rep(&gamma, -1.0 + 2.0 * e, 2.0),
                rep(&w, (e - 1.0) / e, 1.0 / e),
            ],
        )
    } else {
        check_window(t0 - 2.0 * e >= 0.0 && t0 + 2.0 * e <= 1.0, t0, e)?;
        (
            vec![0.0, t0 - 2.0 * e, t0 - e, t0 + e, t0 + 2.0 * e, 1.0],
            vec![
                gamma.clone(),
                rep(&gamma, 2.0 * e - t0, 2.0),
                rep(&w, (e - t0) / (2.0 * e), 1.0 / (2.0 * e)),
                rep(&gamma, -t0 - 2.0 * e, 2.0),
                gamma,
            ],
        )
    };
    PiecewiseProfile::new(knots, pieces)
}

fn check_window(ok: bool, t0: f64, e: f64) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "window [{}, {}] leaves [0, 1]",
            t0 - 2.0 * e,
            t0 + 2.0 * e
        )))
    }
}

/// `∫ₐᵇ v` for the speed column of a profile, by composite Simpson on each
/// smooth piece.
pub fn arc_length<const C: usize, P: ProfileFn<C> + ?Sized>(p: &P, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let mut cuts = vec![a];
    let mut br = p.breakpoints();
    br.sort_by(f64::total_cmp);
    cuts.extend(br.into_iter().filter(|&x| x > a && x < b));
    cuts.push(b);
    const PANELS: usize = 512;
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        let h = (x1 - x0) / (2 * PANELS) as f64;
        let mut s = p.eval(x0, Side::Right)[0] + p.eval(x1, Side::Left)[0];
        for k in 1..2 * PANELS {
            let f = p.eval(x0 + k as f64 * h, Side::Right)[0];
            s += if k % 2 == 1 { 4.0 * f } else { 2.0 * f };
        }
        total += s * h / 3.0;
    }
    total
}

/// Result of [`lemma_nu`]: the modified arc `ν` and its transition times.
#[derive(Clone)]
pub struct NuArc {
    /// `ν` on `[0, 1]`; it is the input curve outside `[t_mmm, t_ppp]`.
    pub profile: PiecewiseProfile<2>,
    pub k0: f64,
    pub k1: f64,
    pub t0: f64,
    pub t_mmm: f64,
    pub t_mm: f64,
    pub t_m: f64,
    pub t_p: f64,
    pub t_pp: f64,
    pub t_ppp: f64,
    /// Lengths of the arcs on the first `K0` circle, the `K1` circle and the second `K0` circle.
    pub circle_lengths: [f64; 3],
    /// Lengths of the input on `[t_mmm, t0]` and `[t0, t_ppp]`.
    pub gamma_lengths: [f64; 2],
    /// Max-norm gap between the frame reached along `ν` and the input frame at `t_ppp`.
    pub closure_residual: f64,
}

impl NuArc {
    /// Length of `ν` on `[t_mmm, t_ppp]`.
    pub fn nu_length(&self) -> f64 {
        self.circle_lengths.iter().sum()
    }

    /// Length of `ν` on `[t_m, t_p]`.
    pub fn middle_gap(&self) -> f64 {
        arc_length(&self.profile, self.t_m, self.t_p)
    }

    /// Residuals of the two length-matching equations that define `t_m` and `t_p`.
    pub fn length_residuals(&self) -> [f64; 2] {
        [
            (self.gamma_lengths[0] - arc_length(&self.profile, self.t_mmm, self.t_m)).abs(),
            (self.gamma_lengths[1] - arc_length(&self.profile, self.t_p, self.t_ppp)).abs(),
        ]
    }
}

/// Frame reached from `I` along `p` on `[a, b]`.
fn relative_frame(p: &SharedProfile<2>, a: f64, b: f64) -> Result<Matrix3<f64>> {
    let sub = Reparametrized::new(p.clone(), a, b - a);
    let f: FrameCurve3 = integrate_frame(&ProfileGenerator(&sub), Grid::new(FRAME_STEPS)?);
    Ok(f.final_frame())
}

/// Angle of the right-handed rotation about `axis` taking `x` to `y`, in `[0, 2π)`.
fn rotation_angle(axis: &Vector3<f64>, x: &Vector3<f64>, y: &Vector3<f64>) -> f64 {
    let xp = x - axis * axis.dot(x);
    let yp = y - axis * axis.dot(y);
    axis.dot(&xp.cross(&yp))
        .atan2(xp.dot(&yp))
        .rem_euclid(2.0 * PI)
}

/// Spherical centre of the circle of curvature `k` tangent to the frame `f`.
fn circle_centre(f: &Matrix3<f64>, k: f64) -> Vector3<f64> {
    let rho = (1.0 / k).atan();
    f.column(0) * rho.cos() + f.column(2) * rho.sin()
}

/// Replaces a convex arc of `γ` around `t0` by arcs of three circles.
///
/// `ν` leaves `γ` at `t_mmm` along the tangent circle of curvature `k0`, switches
/// to a circle of curvature `k1` tangent to it, and rejoins `γ` at `t_ppp` along the
/// second tangent circle of curvature `k0`. The times `t_m`, `t_p` on the `k1`
/// circle are where `ν` has covered the lengths of `γ` on `[t_mmm, t0]` and
/// `[t0, t_ppp]`.
pub fn lemma_nu(
    gamma: &SharedProfile<2>,
    t0: f64,
    epsilon: f64,
    k0: f64,
    k1: f64,
    t_mmm: f64,
    t_ppp: f64,
) -> Result<NuArc> {
    let (lo, hi) = (t0 - 2.0 * epsilon, t0 + 2.0 * epsilon);
    if !(lo >= 0.0 && hi <= 1.0 && lo <= t_mmm && t_mmm < t0 && t0 < t_ppp && t_ppp <= hi) {
        return Err(Error::InvalidParameter(format!(
            "need 0 ≤ t0 − 2ε ≤ t_mmm < t0 < t_ppp ≤ t0 + 2ε ≤ 1, got t0 = {t0}, ε = {epsilon}, [{t_mmm}, {t_ppp}]"
        )));
    }
    if !(0.0 < k0 && k0 < k1) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < K0 < K1, got {k0}, {k1}"
        )));
    }
    for (t, k) in window_samples(gamma, lo, hi) {
        if !(k0 < k[1] && k[1] < k1) {
            return Err(Error::ConditionViolated {
                condition: "K1 > κ > K0",
                t,
            });
        }
    }
    let f_mid = relative_frame(gamma, t_mmm, t0)?;
    let f_end = f_mid * relative_frame(gamma, t0, t_ppp)?;
    let (rho0, rho1) = ((1.0 / k0).atan(), (1.0 / k1).atan());
    let start = Matrix3::identity();
    let a = circle_centre(&start, k0);
    let b = circle_centre(&f_end, k0);
    let x = f_mid.column(0).into_owned();
    // centre of the small circle: at angle ρ0 − ρ1 from both a and b, on the side of γ(t0)
    let m = a.dot(&b);
    let axb = a.cross(&b);
    let r = rho0 - rho1;
    let alpha = r.cos() / (1.0 + m);
    let beta2 = 1.0 - 2.0 * r.cos().powi(2) / (1.0 + m);
    if !(beta2 >= 0.0) || axb.norm() < 1e-12 {
        return Err(Error::Construction {
            reason: "no circle of curvature K1 touches both K0 circles".into(),
            residual: beta2,
        });
    }
    let side = x.dot(&axb).signum();
    let c = (a + b) * alpha + axb.normalize() * (side * beta2.sqrt());
    let contact = |centre: &Vector3<f64>| -> Vector3<f64> {
        let u = (c - centre * centre.dot(&c)).normalize();
        centre * rho0.cos() + u * rho0.sin()
    };
    let (p1, p2) = (contact(&a), contact(&b));
    let q = f_end.column(0).into_owned();
    let lengths = [
        rho0.sin() * rotation_angle(&a, &Vector3::x(), &p1),
        rho1.sin() * rotation_angle(&c, &p1, &p2),
        rho0.sin() * rotation_angle(&b, &p2, &q),
    ];
    let gamma_lengths = [arc_length(gamma, t_mmm, t0), arc_length(gamma, t0, t_ppp)];
    let before = gamma_lengths[0] - lengths[0];
    let after = gamma_lengths[1] - lengths[2];
    let gap = lengths[1] - before - after;
    if !(before > 0.0 && after > 0.0 && gap > 0.0) {
        return Err(Error::Construction {
            reason: format!("length matching puts t₋ or t₊ off the K1 circle ({before:.3e}, {after:.3e}, {gap:.3e})"),
            residual: before.min(after).min(gap),
        });
    }
    let d = 0.5 * (t0 - t_mmm).min(t_ppp - t0);
    let t_mm = t0 - d * (before + gap / 2.0) / lengths[1];
    let t_pp = t0 + d * (after + gap / 2.0) / lengths[1];
    let t_m = t_mm + d * before / lengths[1];
    let t_p = t_pp - d * after / lengths[1];
    let piece =
        |len: f64, dur: f64, k: f64| -> SharedProfile<2> { Arc::new(Constant([len / dur, k])) };
    let profile = PiecewiseProfile::new(
        vec![0.0, t_mmm, t_mm, t_pp, t_ppp, 1.0],
        vec![
            gamma.clone(),
            piece(lengths[0], t_mm - t_mmm, k0),
            piece(lengths[1], t_pp - t_mm, k1),
            piece(lengths[2], t_ppp - t_pp, k0),
            gamma.clone(),
        ],
    )?;
    let g: SharedProfile<2> = Arc::new(profile.clone());
    let closure_residual = (relative_frame(&g, t_mmm, t_ppp)? - f_end).amax();
    if closure_residual > 1e-8 {
        return Err(Error::Construction {
            reason: "the three circles do not rejoin the arc".into(),
            residual: closure_residual,
        });
    }
    Ok(NuArc {
        profile,
        k0,
        k1,
        t0,
        t_mmm,
        t_mm,
        t_m,
        t_p,
        t_pp,
        t_ppp,
        circle_lengths: lengths,
        gamma_lengths,
        closure_residual,
    })
}

/// Dense samples of a profile on `[a, b]`, with both one-sided values at breakpoints.
fn window_samples<const C: usize, P: ProfileFn<C> + ?Sized>(
    p: &P,
    a: f64,
    b: f64,
) -> Vec<(f64, [f64; C])> {
    const COUNT: usize = 2048;
    let mut out: Vec<(f64, [f64; C])> = (0..=COUNT)
        .map(|k| a + (b - a) * k as f64 / COUNT as f64)
        .map(|t| (t, p.eval(t, Side::Right)))
        .collect();
    out[COUNT].1 = p.eval(b, Side::Left);
    for t in p.breakpoints().into_iter().filter(|&t| t > a && t < b) {
        out.push((t, p.eval(t, Side::Left)));
        out.push((t, p.eval(t, Side::Right)));
    }
    out
}

/// Result of [`sharp`].
#[derive(Clone)]
pub struct SharpResult {
    pub pair: CurvePair,
    pub k0: f64,
    pub k1: f64,
    /// `|κ|` of the reflected circle block on the right curve.
    pub k2: f64,
    pub nu: NuArc,
}

/// The `#` operation on a pair satisfying condition (L), at an interior `t0`.
///
/// Outside `[t0 − 2ε, t0 + 2ε]` the pair is unchanged. On the outer quarters both
/// curves run at double speed, the left one along `ν` from [`lemma_nu`]. On the
/// middle half the left curve goes twice around the `K1` circle and on to `ν(t₊)`,
/// while the right curve runs twice around a reflected circle of the same length.
pub fn sharp(pair: &CurvePair, t0: f64, epsilon: f64) -> Result<SharpResult> {
    let (lo, hi) = (t0 - 2.0 * epsilon, t0 + 2.0 * epsilon);
    if !(epsilon > 0.0 && lo >= 0.0 && hi <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "window [{lo}, {hi}] leaves [0, 1]"
        )));
    }
    if let Some(t) = check_condition(pair, Condition::L).witness {
        return Err(Error::ConditionViolated { condition: "L", t });
    }
    let base: SharedProfile<3> = Arc::new(pair.profile().clone());
    let left: SharedProfile<2> = Arc::new(pair.left());
    let samples = window_samples(&base, lo, hi);
    let kmin = samples.iter().map(|s| s.1[1]).fold(f64::INFINITY, f64::min);
    let kmax = samples
        .iter()
        .map(|s| s.1[1])
        .fold(f64::NEG_INFINITY, f64::max);
    let rmax = samples.iter().map(|s| s.1[2].abs()).fold(0.0, f64::max);
    if !(kmin > rmax) {
        return Err(Error::ConditionViolated {
            condition: "L",
            t: t0,
        });
    }
    let k0 = (kmin + rmax) / 2.0;
    let mut last = None;
    for factor in [1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0] {
        let k1 = kmax * factor;
        for frac in [1.0, 0.75, 0.5, 0.25] {
            let nu = match lemma_nu(
                &left,
                t0,
                epsilon,
                k0,
                k1,
                t0 - 2.0 * epsilon * frac,
                t0 + 2.0 * epsilon * frac,
            ) {
                Ok(nu) => nu,
                Err(e) => {
                    last = Some(e);
                    continue;
                }
            };
            let c1 = 2.0 * PI / (1.0 + k1 * k1).sqrt();
            let c2 = c1 + nu.middle_gap() / 2.0;
            if c2 >= 2.0 * PI {
                continue;
            }
            // σ_{c2} has spherical radius ρ with 2π sin ρ = c2
            let k2 = 1.0 / (c2 / (2.0 * PI)).asin().tan();
            let block = SharpProfile::new(base.clone(), &left, &nu, epsilon, 2.0 * c2, k2);
            let sampled = SampledProfile::from_fn(pair.grid(), Arc::new(block))?;
            let out = CurvePair::new(sampled)?;
            return Ok(SharpResult {
                pair: out,
                k0,
                k1,
                k2,
                nu,
            });
        }
    }
    Err(last.unwrap_or(Error::Construction {
        reason: "no K1 keeps the reflected circle shorter than 2π".into(),
        residual: 0.0,
    }))
}

/// Profile `(v, κ_l, κ_r)` of the output of [`sharp`].
struct SharpProfile {
    base: SharedProfile<3>,
    t0: f64,
    e: f64,
    t_mmm: f64,
    s_minus: f64,
    s_plus: f64,
    t_ppp: f64,
    k0: f64,
    k1: f64,
    k2: f64,
    middle_speed: f64,
}

impl SharpProfile {
    fn new(
        base: SharedProfile<3>,
        left: &SharedProfile<2>,
        nu: &NuArc,
        e: f64,
        middle_length: f64,
        k2: f64,
    ) -> Self {
        let [l1, _, l3] = nu.circle_lengths;
        let s_minus = solve_increasing(|s| arc_length(left, nu.t_mmm, s) - l1, nu.t_mmm, nu.t0);
        let s_plus = solve_increasing(|s| l3 - arc_length(left, s, nu.t_ppp), nu.t0, nu.t_ppp);
        Self {
            base,
            t0: nu.t0,
            e,
            t_mmm: nu.t_mmm,
            s_minus,
            s_plus,
            t_ppp: nu.t_ppp,
            k0: nu.k0,
            k1: nu.k1,
            k2,
            middle_speed: middle_length / (2.0 * e),
        }
    }
}

/// Root of an increasing function on `[a, b]` by bisection.
fn solve_increasing(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if f(m) < 0.0 {
            a = m;
        } else {
            b = m;
        }
        if b - a < 1e-15 {
            break;
        }
    }
    0.5 * (a + b)
}

impl ProfileFn<3> for SharpProfile {
    fn eval(&self, t: f64, side: Side) -> [f64; 3] {
        let (t0, e) = (self.t0, self.e);
        let inside = |a: f64, b: f64| match side {
            Side::Right => t >= a && t < b,
            Side::Left => t > a && t <= b,
        };
        let before = |x: f64, y: f64| match side {
            Side::Right => x < y,
            Side::Left => x <= y,
        };
        if inside(t0 - 2.0 * e, t0 - e) {
            let s = 2.0 * t - t0 + 2.0 * e;
            let [v, kl, kr] = self.base.eval(s, side);
            let k = if before(s, self.t_mmm) {
                kl
            } else if before(s, self.s_minus) {
                self.k0
            } else {
                self.k1
            };
            [2.0 * v, k, kr]
        } else if inside(t0 - e, t0 + e) {
            [self.middle_speed, self.k1, -self.k2]
        } else if inside(t0 + e, t0 + 2.0 * e) {
            let s = 2.0 * t - t0 - 2.0 * e;
            let [v, kl, kr] = self.base.eval(s, side);
            let k = if before(s, self.s_plus) {
                self.k1
            } else if before(s, self.t_ppp) {
                self.k0
            } else {
                kl
            };
            [2.0 * v, k, kr]
        } else {
            self.base.eval(t, side)
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        let (t0, e) = (self.t0, self.e);
        let (lo, hi) = (t0 - 2.0 * e, t0 + 2.0 * e);
        let mut b: Vec<f64> = self
            .base
            .breakpoints()
            .into_iter()
            .filter(|&x| x < lo || x > hi)
            .collect();
        b.extend([lo, t0 - e, t0 + e, hi]);
        for s in [self.t_mmm, self.s_minus] {
            b.push((s + t0 - 2.0 * e) / 2.0);
        }
        for s in [self.s_plus, self.t_ppp] {
            b.push((s + t0 + 2.0 * e) / 2.0);
        }
        for s in self
            .base
            .breakpoints()
            .into_iter()
            .filter(|&x| x > lo && x < hi)
        {
            if s <= t0 {
                b.push((s + t0 - 2.0 * e) / 2.0);
            }
            if s >= t0 {
                b.push((s + t0 + 2.0 * e) / 2.0);
            }
        }
        b.retain(|&x| x > 0.0 && x < 1.0);
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }
}

/// Parameters of relaxation-reflection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RRParams {
    pub epsilon: f64,
    pub delta: f64,
}

impl RRParams {
    /// Largest `ε` and `δ` for which the cell of the hat pair has been checked.
    pub const MAX: f64 = 0.3;

    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        for (name, x) in [("ε", epsilon), ("δ", delta)] {
            if !(x > 0.0 && x <= Self::MAX) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {x} is outside (0, {}]",
                    Self::MAX
                )));
            }
        }
        Ok(Self { epsilon, delta })
    }

    /// The amount added to `−κ` at `t`, using the one-sided convention at `ε` and `1 − ε`.
    pub fn shift(&self, t: f64, side: Side) -> f64 {
        let (e, d) = (self.epsilon, self.delta);
        let near_ends = match side {
            Side::Right => t < e || t >= 1.0 - e,
            Side::Left => t <= e || t > 1.0 - e,
        };
        if near_ends {
            d
        } else {
            d * d * e * e
        }
    }
}

struct RelaxReflect {
    inner: SharedProfile<2>,
    params: RRParams,
}

impl ProfileFn<2> for RelaxReflect {
    fn eval(&self, t: f64, side: Side) -> [f64; 2] {
        let [v, k] = self.inner.eval(t, side);
        [v, -k + self.params.shift(t, side)]
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.inner.breakpoints();
        b.extend([self.params.epsilon, 1.0 - self.params.epsilon]);
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }
}

/// Same speed as `γ`, curvature `−κ + δ` on `(0, ε) ∪ (1 − ε, 1)` and `−κ + δ²ε²`
/// in between.
pub fn relax_reflect(gamma: &CurvatureProfile2, params: RRParams) -> Result<CurvatureProfile2> {
    let grid = gamma.grid();
    for i in 0..grid.len() {
        let k = gamma.value(i)[1];
        if !(k > 0.0) {
            return Err(Error::NonPositiveCurvature {
                t: grid.t(i),
                kappa: k,
            });
        }
    }
    let v = gamma.v();
    let k: Vec<f64> = (0..grid.len())
        .map(|i| -gamma.value(i)[1] + params.shift(grid.t(i), Side::Right))
        .collect();
    let mut limits: Vec<(usize, [f64; 2])> = gamma
        .left_limits()
        .map(|(j, [lv, lk])| (j, [lv, -lk + params.shift(grid.t(j), Side::Left)]))
        .collect();
    for b in [params.epsilon, 1.0 - params.epsilon] {
        let j = grid.nearest(b);
        if j > 0 && j < grid.n() && grid.t(j) == b && !limits.iter().any(|&(i, _)| i == j) {
            limits.push((j, [v[j], -gamma.value(j)[1] + params.shift(b, Side::Left)]));
        }
    }
    let mut out = SampledProfile::from_columns(grid, [&v, &k])?.with_left_limits(limits)?;
    let inner: SharedProfile<2> = match gamma.source() {
        Some(s) => s.clone(),
        None => Arc::new(gamma.clone()),
    };
    out = out.with_source(Arc::new(RelaxReflect { inner, params }));
    Ok(out)
}

/// The pair `(γ, RR γ)` and the lifted Bruhat cell of its final spin frame.
#[derive(Debug, Clone)]
pub struct HatPair {
    pub pair: CurvePair,
    pub cell: BruhatCellSpin<Spin4Element>,
    /// `(𝟏, −𝐤)` when `γ` closes with lift `𝟏`, `(−𝟏, 𝐤)` when it closes with `−𝟏`.
    pub expected: Spin4Element,
}

impl HatPair {
    /// Whether the final frame lies in the lifted cell of `expected`.
    pub fn in_expected_cell(&self) -> Result<bool> {
        let want = classify_spin::<4, Spin4Element>(&self.expected)?;
        Ok(self.cell.same_cell(&want))
    }
}

pub fn hat_pair(gamma: &CurvatureProfile2, params: RRParams) -> Result<HatPair> {
    let rr = relax_reflect(gamma, params)?;
    let pair = CurvePair::from_halves(gamma, &rr)?;
    let one = UnitQuaternion::IDENTITY;
    let k = UnitQuaternion::new(Quaternion::K)?;
    let expected = if pair.z_l().distance(&one) < 1e-6 {
        Spin4Element::new(one, -k)
    } else if pair.z_l().distance(&-one) < 1e-6 {
        Spin4Element::new(-one, k)
    } else {
        return Err(Error::InvalidParameter(format!(
            "final lift {} of γ is not ±1",
            pair.z_l()
        )));
    };
    let cell = classify_spin::<4, Spin4Element>(&pair.final_spin())?;
    Ok(HatPair {
        pair,
        cell,
        expected,
    })
}

/// `h_r = cos δ (−𝐢 + 𝐤)/√2 + sin δ (𝐢 + 𝐤)/√2`.
pub fn relaxation_h_r(delta: f64) -> ImaginaryQuaternion {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ImaginaryQuaternion::new(
        s * (delta.sin() - delta.cos()),
        0.0,
        s * (delta.sin() + delta.cos()),
    )
}

/// `Π₄(𝟏, exp(−ε h_r))`.
pub fn relaxation_frame(epsilon: f64, delta: f64) -> Matrix4<f64> {
    pi4(&relaxation_spin(epsilon, delta))
}

pub fn relaxation_spin(epsilon: f64, delta: f64) -> Spin4Element {
    Spin4Element::new(
        UnitQuaternion::IDENTITY,
        exp_im(&relaxation_h_r(delta), -epsilon),
    )
}

/// Closed form of [`relaxation_frame`], column by column.
pub fn relaxation_columns(epsilon: f64, delta: f64) -> Matrix4<f64> {
    let (c, s) = (delta.cos(), delta.sin());
    let ce = epsilon.cos();
    let se = epsilon.sin() * std::f64::consts::FRAC_1_SQRT_2;
    Matrix4::new(
        ce,
        (c - s) * se,
        0.0,
        (-c - s) * se, //
        (s - c) * se,
        ce,
        (c + s) * se,
        0.0, //
        0.0,
        (-c - s) * se,
        ce,
        (s - c) * se, //
        (c + s) * se,
        0.0,
        (c - s) * se,
        ce,
    )
}

/// The antidiagonal signed permutation labelling the cell of [`relaxation_frame`].
pub fn relaxation_cell() -> SignedPermutation {
    let m = Matrix4::new(
        0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0,
    );
    SignedPermutation::from_matrix(&m, 1e-12).expect("a signed permutation matrix")
}

/// Whether a profile on S² (`κ > 0`) or S³ (`κ > 0`, `τ > 0`) is locally convex at
/// every sample and one-sided limit.
pub fn profile_is_locally_convex<const C: usize, P: ProfileFn<C> + ?Sized>(
    p: &P,
    grid: Grid,
) -> bool {
    window_samples(p, 0.0, 1.0)
        .into_iter()
        .chain((0..grid.len()).map(|i| (grid.t(i), p.eval(grid.t(i), Side::Right))))
        .all(|(_, x)| x[0] > 0.0 && x[1..].iter().all(|&k| k > 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bruhat::classify_so;
    use crate::curves::families::gamma_family_profile;
    use crate::curves::FnProfile;
    use crate::decompose::decompose3;
    use crate::frames_ode::integrate_spin;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(x: Quaternion) -> UnitQuaternion {
        UnitQuaternion::new(x).unwrap()
    }

    fn final_spin2(p: &dyn ProfileFn<2>, n: usize) -> UnitQuaternion {
        *integrate_spin::<3, UnitQuaternion, _>(&ProfileGenerator(p), Grid::new(n).unwrap())
            .last()
            .unwrap()
    }

    fn final_spin3(p: &dyn ProfileFn<3>, n: usize) -> Spin4Element {
        *integrate_spin::<4, Spin4Element, _>(&ProfileGenerator(p), Grid::new(n).unwrap())
            .last()
            .unwrap()
    }

    #[test]
    fn loops_on_sigma() {
        let gamma: SharedProfile<2> = Arc::new(sigma_profile(PI, 1.0).unwrap());
        let out = add_loops(gamma, &SurgerySpec::sphere2(0.5)).unwrap();
        assert!(final_spin2(&out, 8192).distance(&-UnitQuaternion::IDENTITY) < 1e-6);
        assert!(profile_is_locally_convex(&out, Grid::new(1024).unwrap()));
    }

    #[test]
    fn loops_on_gamma_1_1() {
        let gamma: SharedProfile<3> = Arc::new(gamma_family_profile(1.0));
        let out = add_loops(gamma, &SurgerySpec::sphere3(0.5)).unwrap();
        let z = final_spin3(&out, 8192);
        assert!(
            z.distance(&Spin4Element::new(
                -UnitQuaternion::IDENTITY,
                q(Quaternion::K)
            )) < 1e-6,
            "{z}"
        );
    }

    #[test]
    fn loops_at_the_ends() {
        let gamma: SharedProfile<2> = Arc::new(FnProfile(|t: f64| [3.0 + t, 1.0 + t * t]));
        let spec = SurgerySpec::sphere2(0.0);
        let out = add_loops(gamma.clone(), &spec).unwrap();
        let e = spec.epsilon;
        for k in 0..10 {
            let t = e * k as f64 / 10.0;
            let want = spec.omega.eval(t / e, Side::Right);
            let got = out.eval(t, Side::Right);
            assert_eq!(got, [want[0] / e, want[1]]);
        }
        let z = final_spin2(gamma.as_ref(), 8192);
        for t0 in [0.0, 1.0] {
            let out = add_loops(gamma.clone(), &SurgerySpec::sphere2(t0)).unwrap();
            assert!(final_spin2(&out, 8192).distance(&z) < 1e-6);
        }
    }

    #[test]
    fn loops_reject_bad_input() {
        let gamma: SharedProfile<2> = Arc::new(Constant([1.0, 1.0]));
        assert!(add_loops(gamma.clone(), &SurgerySpec::sphere2(0.05)).is_err());
        let open: SharedProfile<2> = Arc::new(Constant([1.0, 1.0]));
        assert!(matches!(
            add_loops(gamma, &SurgerySpec::sphere2(0.5).with_omega(open)),
            Err(Error::Construction { .. })
        ));
    }

    #[test]
    fn loops_preserve_frames_on_random_profiles() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..4 {
            let c: [f64; 4] = std::array::from_fn(|_| rng.random_range(-0.5..0.5));
            let gamma: SharedProfile<3> = Arc::new(FnProfile(move |t: f64| {
                [
                    4.0 + c[0] * (3.0 * t).sin(),
                    1.0 + c[1] * t,
                    1.0 + c[2] * (2.0 * t).cos() + c[3] * t,
                ]
            }));
            let t0 = rng.random_range(0.1..0.9);
            let out = add_loops(gamma.clone(), &SurgerySpec::sphere3(t0)).unwrap();
            let (a, b) = (final_spin3(gamma.as_ref(), 8192), final_spin3(&out, 8192));
            assert!(a.distance(&b) < 1e-6, "t0 = {t0}: {a} vs {b}");
            assert!(profile_is_locally_convex(&out, Grid::new(1024).unwrap()));
        }
    }

    #[test]
    fn nu_on_a_circle() {
        let k = 3f64.sqrt();
        let gamma: SharedProfile<2> = Arc::new(Constant([PI, k]));
        let (t0, e) = (0.5, 1.0 / 32.0);
        let nu = lemma_nu(&gamma, t0, e, k / 2.0, 2.0 * k, t0 - 2.0 * e, t0 + 2.0 * e).unwrap();
        assert!(nu.t_mmm < nu.t_mm && nu.t_mm < nu.t_m && nu.t_m < t0);
        assert!(t0 < nu.t_p && nu.t_p < nu.t_pp && nu.t_pp < nu.t_ppp);
        for (a, b, want) in [
            (nu.t_mmm, nu.t_mm, k / 2.0),
            (nu.t_mm, nu.t_pp, 2.0 * k),
            (nu.t_pp, nu.t_ppp, k / 2.0),
        ] {
            for s in [0.1, 0.5, 0.9] {
                assert_eq!(nu.profile.eval(a + s * (b - a), Side::Right)[1], want);
            }
        }
        for t in [0.0, 0.2, nu.t_mmm - 1e-9, nu.t_ppp + 1e-9, 0.9] {
            assert_eq!(nu.profile.eval(t, Side::Right), gamma.eval(t, Side::Right));
        }
        let total = nu.gamma_lengths[0] + nu.gamma_lengths[1];
        assert!(nu.nu_length() > total * (1.0 + 1e-12));
        assert!(
            nu.length_residuals().iter().all(|&r| r < 1e-8),
            "{:?}",
            nu.length_residuals()
        );
        assert!(nu.closure_residual < 1e-8);
    }

    #[test]
    fn nu_rejects_bad_bounds() {
        let gamma: SharedProfile<2> = Arc::new(Constant([PI, 1.0]));
        assert!(matches!(
            lemma_nu(&gamma, 0.5, 0.05, 1.5, 2.0, 0.4, 0.6),
            Err(Error::ConditionViolated { .. })
        ));
    }

    #[test]
    fn sharp_on_omega3_pair() {
        let grid = Grid::new(8192).unwrap();
        let p = SampledProfile::from_fn(grid, Arc::new(omega3_profile())).unwrap();
        let pair = decompose3(&p).unwrap();
        let (t0, e) = (0.5, 1.0 / 32.0);
        let out = sharp(&pair, t0, e).unwrap();
        assert!(check_condition(&out.pair, Condition::L).holds);
        for i in 0..grid.len() {
            let t = grid.t(i);
            if t < t0 - 2.0 * e || t > t0 + 2.0 * e {
                assert_eq!(out.pair.profile().value(i), pair.profile().value(i));
            }
            if t > t0 - e && t < t0 + e {
                let [_, kl, kr] = out.pair.profile().value(i);
                assert_eq!(kl, out.k1);
                assert_eq!(kr, -out.k2);
            }
        }
        assert!(out.k1 > out.k2 && out.k2 > 0.0);
        assert!(
            out.pair.final_spin().distance(&pair.final_spin()) < 1e-6,
            "{}",
            out.pair.final_spin()
        );
    }

    #[test]
    fn relax_reflect_sigma() {
        let grid = Grid::new(1000).unwrap();
        let gamma = SampledProfile::constant(grid, [PI, 3f64.sqrt()]).unwrap();
        let params = RRParams::new(0.1, 0.1).unwrap();
        let rr = relax_reflect(&gamma, params).unwrap();
        assert_eq!(rr.v(), gamma.v());
        let k = 3f64.sqrt();
        for i in 0..grid.len() {
            let t = grid.t(i);
            let want = if t < 0.1 || t >= 0.9 {
                -k + 0.1
            } else {
                -k + 1e-4
            };
            assert!((rr.value(i)[1] - want).abs() < 1e-15);
        }
        assert_eq!(rr.left_limits().count(), 2);
        let pair = CurvePair::from_halves(&gamma, &rr).unwrap();
        assert!(check_condition(&pair, Condition::L).holds);
        assert!(RRParams::new(0.4, 0.1).is_err());
    }

    #[test]
    fn relaxation_columns_match() {
        for (e, d) in [(0.1, 0.1), (0.05, 0.3), (0.3, 0.2)] {
            assert!((relaxation_frame(e, d) - relaxation_columns(e, d)).amax() < 1e-12);
        }
        let cell = classify_so(&relaxation_frame(0.1, 0.1)).unwrap();
        assert_eq!(cell.rep, relaxation_cell());
        assert_eq!(cell.rep.inv_count(), 6);
    }

    #[test]
    fn hat_pairs_land_in_the_open_cells() {
        let grid = Grid::new(4096).unwrap();
        let closed_curve = SampledProfile::constant(grid, [2.0 * 2f64.sqrt() * PI, 1.0]).unwrap();
        let sigma = SampledProfile::constant(grid, [PI, 3f64.sqrt()]).unwrap();
        for (gamma, sign) in [(closed_curve, 1.0), (sigma, -1.0)] {
            let h = hat_pair(&gamma, RRParams::new(0.1, 0.1).unwrap()).unwrap();
            assert_eq!(h.expected.left.quaternion().a, sign);
            assert_eq!(h.cell.rep_so, relaxation_cell());
            assert!(h.in_expected_cell().unwrap());
        }
    }
}
