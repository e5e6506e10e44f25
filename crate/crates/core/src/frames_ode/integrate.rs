use nalgebra::{SMatrix, SVector};

use super::generator::{Generator, ProfileGenerator, SampledGenerator};
use super::jacobi::ImTangentPair;
use crate::config::Tolerances;
use crate::curves::{fornberg_weights, Grid, ProfileFn, SampledCurve, Side};
use crate::error::{Error, Result};
use crate::linalg::orthogonal_factor;
use crate::spin_algebra::{
    check_special_orthogonal_within, dpi3, ImaginaryQuaternion, Spin4Element, SpinCover,
    UnitQuaternion,
};

/// Sampled frames in `SO_M` together with a continuous lift to the spin group.
#[derive(Debug, Clone)]
pub struct FrameCurve<const M: usize, S> {
    grid: Grid,
    frames: Vec<SMatrix<f64, M, M>>,
    spin: Vec<S>,
}

pub type FrameCurve3 = FrameCurve<3, UnitQuaternion>;
pub type FrameCurve4 = FrameCurve<4, Spin4Element>;

impl<const M: usize, S: SpinCover<M>> FrameCurve<M, S> {
    /// Checks lengths and that every lift projects to its frame within the round-trip tolerance.
    pub fn new(grid: Grid, frames: Vec<SMatrix<f64, M, M>>, spin: Vec<S>) -> Result<Self> {
        if frames.len() != grid.len() || spin.len() != grid.len() {
            return Err(Error::Shape(format!(
                "{} frames and {} lifts on a grid of {}",
                frames.len(),
                spin.len(),
                grid.len()
            )));
        }
        for (i, (f, z)) in frames.iter().zip(&spin).enumerate() {
            let residual = (z.project() - f).amax();
            if residual > Tolerances::DEFAULT.round_trip {
                return Err(Error::Construction {
                    reason: format!("lift does not cover frame at t = {}", grid.t(i)),
                    residual,
                });
            }
        }
        Ok(Self { grid, frames, spin })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn frames(&self) -> &[SMatrix<f64, M, M>] {
        &self.frames
    }

    pub fn spin(&self) -> &[S] {
        &self.spin
    }

    pub fn final_frame(&self) -> SMatrix<f64, M, M> {
        self.frames[self.grid.n()]
    }

    pub fn final_spin(&self) -> S {
        self.spin[self.grid.n()]
    }

    /// The curve `γ(t) = Γ(t) e₁`.
    pub fn curve(&self) -> Vec<SVector<f64, M>> {
        self.frames
            .iter()
            .map(|f| f.column(0).into_owned())
            .collect()
    }

    /// Largest `‖ΓᵀΓ − I‖` over the samples.
    pub fn orthogonality_defect(&self) -> f64 {
        let id = SMatrix::<f64, M, M>::identity();
        self.frames
            .iter()
            .map(|f| (f.transpose() * f - id).amax())
            .fold(0.0, f64::max)
    }
}

/// Sub-steps of `[t_i, t_{i+1}]` split at the generator's breakpoints.
fn substeps(grid: &Grid, breaks: &[f64], i: usize) -> Vec<(f64, f64)> {
    let (a, b) = (grid.t(i), grid.t(i + 1));
    let mut pts = vec![a];
    pts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    pts.push(b);
    pts.windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| (w[0], w[1]))
        .collect()
}

fn sorted_breaks<const M: usize, G: Generator<M> + ?Sized>(g: &G) -> Vec<f64> {
    let mut b = g.breakpoints();
    b.sort_by(f64::total_cmp);
    b
}

fn rk4_so<const M: usize>(
    q: &SMatrix<f64, M, M>,
    a0: &SMatrix<f64, M, M>,
    am: &SMatrix<f64, M, M>,
    a1: &SMatrix<f64, M, M>,
    dt: f64,
) -> SMatrix<f64, M, M> {
    let k1 = q * a0;
    let k2 = (q + k1 * (dt / 2.0)) * am;
    let k3 = (q + k2 * (dt / 2.0)) * am;
    let k4 = (q + k3 * dt) * a1;
    orthogonal_factor(&(q + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)))
}

/// Solves `Γ′ = ΓΛ`, `Γ(0) = I`, and `z′ = z·DΠ⁻¹(Λ)`, `z(0) = 𝟏`, on the grid.
pub fn integrate_frame<const M: usize, S: SpinCover<M>, G: Generator<M> + ?Sized>(
    g: &G,
    grid: Grid,
) -> FrameCurve<M, S> {
    integrate_frame_from(g, grid, SMatrix::identity(), S::identity())
}

/// As [`integrate_frame`] from the initial frame `q0` with lift `z0`.
pub fn integrate_frame_from<const M: usize, S: SpinCover<M>, G: Generator<M> + ?Sized>(
    g: &G,
    grid: Grid,
    q0: SMatrix<f64, M, M>,
    z0: S,
) -> FrameCurve<M, S> {
    let breaks = sorted_breaks(g);
    let mut frames = Vec::with_capacity(grid.len());
    let mut spin = Vec::with_capacity(grid.len());
    let (mut q, mut z) = (q0, z0);
    frames.push(q);
    spin.push(z);
    for i in 0..grid.n() {
        for (p, r) in substeps(&grid, &breaks, i) {
            let a0 = g.lambda(p, Side::Right);
            let am = g.lambda((p + r) / 2.0, Side::Right);
            let a1 = g.lambda(r, Side::Left);
            q = rk4_so(&q, &a0, &am, &a1, r - p);
            z = z.rk4_step(&a0, &am, &a1, r - p);
        }
        frames.push(q);
        spin.push(z);
    }
    FrameCurve { grid, frames, spin }
}

/// Spin lift only: `z′ = z·DΠ⁻¹(Λ)`, `z(0) = 𝟏`.
pub fn integrate_spin<const M: usize, S: SpinCover<M>, G: Generator<M> + ?Sized>(
    g: &G,
    grid: Grid,
) -> Vec<S> {
    let breaks = sorted_breaks(g);
    let mut z = S::identity();
    let mut out = Vec::with_capacity(grid.len());
    out.push(z);
    for i in 0..grid.n() {
        for (p, r) in substeps(&grid, &breaks, i) {
            let a0 = g.lambda(p, Side::Right);
            let am = g.lambda((p + r) / 2.0, Side::Right);
            let a1 = g.lambda(r, Side::Left);
            z = z.rk4_step(&a0, &am, &a1, r - p);
        }
        out.push(z);
    }
    out
}

/// Solves `q′ = q·h` in `S³` from samples of `h`.
pub fn integrate_spin3(h: &[ImaginaryQuaternion], grid: Grid) -> Result<Vec<UnitQuaternion>> {
    let g = SampledGenerator::new(grid, h.iter().map(dpi3).collect())?;
    Ok(integrate_spin::<3, UnitQuaternion, _>(&g, grid))
}

/// Solves `(z_l, z_r)′ = (z_l h_l, z_r h_r)` in `S³ × S³` from samples of the pair.
pub fn integrate_spin4(pairs: &[ImTangentPair], grid: Grid) -> Result<Vec<Spin4Element>> {
    let g = SampledGenerator::new(grid, pairs.iter().map(|p| p.to_matrix()).collect())?;
    Ok(integrate_spin::<4, Spin4Element, _>(&g, grid))
}

/// Samples of `Λ = Γ⁻¹Γ′`, with `Γ′` from 7-point finite differences.
pub fn log_derivative<const M: usize, S: SpinCover<M>>(
    f: &FrameCurve<M, S>,
) -> Result<Vec<SMatrix<f64, M, M>>> {
    for q in &f.frames {
        check_special_orthogonal_within(q, Tolerances::DEFAULT.round_trip)?;
    }
    let n = f.grid.n();
    let mut out = Vec::with_capacity(f.grid.len());
    for i in 0..=n {
        let start = i.saturating_sub(3).min(n - 6);
        let nodes: Vec<f64> = (start..start + 7).map(|j| j as f64).collect();
        let w = fornberg_weights(i as f64, &nodes, 1);
        let mut d = SMatrix::<f64, M, M>::zeros();
        for (j, wj) in w[1].iter().enumerate() {
            d += f.frames[start + j] * *wj;
        }
        let lam = f.frames[i].transpose() * d * n as f64;
        out.push((lam - lam.transpose()) / 2.0);
    }
    Ok(out)
}

fn check_speed<const C: usize, P: ProfileFn<C> + ?Sized>(p: &P, grid: &Grid) -> Result<()> {
    for i in 0..grid.len() {
        let v = p.eval(grid.t(i), Side::Right)[0];
        if !(v > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "speed {v} is not positive at t = {}",
                grid.t(i)
            )));
        }
    }
    Ok(())
}

/// The curve on S² with the given `(v, κ)` profile and Frenet frame `I` at `t = 0`.
pub fn curve_from_profile2<P: ProfileFn<2> + ?Sized>(
    p: &P,
    grid: Grid,
) -> Result<(SampledCurve<3>, FrameCurve3)> {
    check_speed(p, &grid)?;
    let f: FrameCurve3 = integrate_frame(&ProfileGenerator(p), grid);
    Ok((SampledCurve::new(grid, f.curve())?, f))
}

/// The curve on S³ with the given `(v, κ, τ)` profile and Frenet frame `I` at `t = 0`.
pub fn curve_from_profile3<P: ProfileFn<3> + ?Sized>(
    p: &P,
    grid: Grid,
) -> Result<(SampledCurve<4>, FrameCurve4)> {
    check_speed(p, &grid)?;
    for i in 0..grid.len() {
        let k = p.eval(grid.t(i), Side::Right)[1];
        if !(k.abs() > Tolerances::DEFAULT.curvature_zero) {
            return Err(Error::NonGeneric { t: grid.t(i) });
        }
    }
    let f: FrameCurve4 = integrate_frame(&ProfileGenerator(p), grid);
    Ok((SampledCurve::new(grid, f.curve())?, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::families::{
        gamma_family_lambda, gamma_family_profile, omega3_point, sigma, sigma_profile,
    };
    use crate::curves::{Constant, SphereCurve};
    use crate::frames_ode::{tridiag, ConstantGenerator};
    use crate::spin_algebra::{exp_im, pi4};
    use nalgebra::{Matrix3, Matrix4};
    use std::f64::consts::PI;

    #[test]
    fn constant_generator_matches_exponential() {
        let grid = Grid::new(1024).unwrap();
        let lam = gamma_family_lambda(1.0);
        let f: FrameCurve4 = integrate_frame(&ConstantGenerator(lam), grid);
        for i in 0..=1024 {
            assert!((f.frames()[i] - (lam * grid.t(i)).exp()).amax() < 1e-8);
        }
        assert!(f.orthogonality_defect() < 1e-12);
        let zero: FrameCurve3 = integrate_frame(&ConstantGenerator(Matrix3::zeros()), grid);
        assert_eq!(zero.final_frame(), Matrix3::identity());
    }

    #[test]
    fn example_endpoints() {
        let grid = Grid::new(1024).unwrap();
        let cases = [
            (
                1.0,
                UnitQuaternion::from_coords(-1.0, 0.0, 0.0, 0.0),
                UnitQuaternion::from_coords(0.0, 0.0, 0.0, 1.0),
            ),
            (
                2.0,
                UnitQuaternion::from_coords(1.0, 0.0, 0.0, 0.0),
                UnitQuaternion::from_coords(-1.0, 0.0, 0.0, 0.0),
            ),
            (
                4.0,
                UnitQuaternion::from_coords(1.0, 0.0, 0.0, 0.0),
                UnitQuaternion::from_coords(1.0, 0.0, 0.0, 0.0),
            ),
        ];
        for (m, l, r) in cases {
            let want = Spin4Element::new(l.unwrap(), r.unwrap());
            let z = integrate_spin::<4, Spin4Element, _>(
                &ProfileGenerator(gamma_family_profile(m)),
                grid,
            );
            assert!(z[1024].distance(&want) < 1e-6, "m = {m}: {}", z[1024]);
        }
    }

    #[test]
    fn omega3_coordinates() {
        let grid = Grid::new(1024).unwrap();
        let (c, _) = curve_from_profile3(&crate::curves::families::omega3_profile(), grid).unwrap();
        for i in 0..=1024 {
            assert!((c.point(i) - omega3_point(grid.t(i))).norm() < 1e-6);
        }
    }

    #[test]
    fn spin_and_frame_commute() {
        let grid = Grid::new(256).unwrap();
        let p = crate::curves::FnProfile(|t: f64| [2.0 + t.sin(), 0.5 + t * t, (3.0 * t).cos()]);
        let f: FrameCurve4 = integrate_frame(&ProfileGenerator(&p), grid);
        for (q, z) in f.frames().iter().zip(f.spin()) {
            assert!((pi4(z) - q).amax() < 1e-6);
        }
        let pairs: Vec<_> = grid
            .times()
            .into_iter()
            .map(|t| {
                let [v, k, tau] = p.eval(t, Side::Right);
                ImTangentPair::from_profile(v, k, tau)
            })
            .collect();
        let z = integrate_spin4(&pairs, grid).unwrap();
        assert!(z[256].distance(&f.final_spin()) < 1e-6);
    }

    #[test]
    fn spin3_constant_generator() {
        let grid = Grid::new(128).unwrap();
        let h = ImaginaryQuaternion::new(3f64.sqrt() * PI / 2.0, 0.0, PI / 2.0);
        let z = integrate_spin3(&vec![h; 129], grid).unwrap();
        for i in [0, 17, 64, 128] {
            assert!(z[i].distance(&exp_im(&h, grid.t(i))) < 1e-8);
        }
        assert!(z[128].distance(&-UnitQuaternion::IDENTITY) < 1e-8);
    }

    #[test]
    fn left_invariance_and_log_derivative() {
        let grid = Grid::new(1024).unwrap();
        let lam = tridiag::<4>(&[1.0, 2.0, -0.5]);
        let q0 = crate::bruhat::random_rotation::<4, _>(
            &mut <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3),
        );
        let z0 = crate::spin_algebra::so4_to_spin(&q0, &Spin4Element::IDENTITY).unwrap();
        let a: FrameCurve4 = integrate_frame(&ConstantGenerator(lam), grid);
        let b: FrameCurve4 = integrate_frame_from(&ConstantGenerator(lam), grid, q0, z0);
        for (x, y) in a.frames().iter().zip(b.frames()) {
            assert!((q0 * x - y).amax() < 1e-8);
        }
        let logs = log_derivative(&a).unwrap();
        assert!(logs.iter().all(|l| (l - lam).amax() < 1e-5));
        let back: FrameCurve4 = integrate_frame(&SampledGenerator::new(grid, logs).unwrap(), grid);
        assert!((back.final_frame() - a.final_frame()).amax() < 1e-5);
    }

    #[test]
    fn sigma_from_profile() {
        let grid = Grid::new(1024).unwrap();
        let (c, f) = curve_from_profile2(&sigma_profile(PI, 1.0).unwrap(), grid).unwrap();
        let exact = sigma(PI, 1.0, grid).unwrap();
        for i in 0..=1024 {
            assert!((c.point(i) - exact.point(i)).norm() < 1e-8);
        }
        assert!(f.final_spin().distance(&-UnitQuaternion::IDENTITY) < 1e-8);
        let p = c.profile().unwrap();
        assert!(p.kappa().iter().all(|k| (k - 3f64.sqrt()).abs() < 1e-4));
        let _ = Matrix4::<f64>::identity();
        let _ = Constant([1.0]);
    }
}
