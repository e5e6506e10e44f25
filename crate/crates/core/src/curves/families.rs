//! Closed-form example curves with exact derivatives.

use std::f64::consts::PI;

use nalgebra::{Matrix4, SVector, Vector4};

use super::grid::Grid;
use super::profile::Constant;
use super::sampled::SampledCurve;
use crate::error::{Error, Result};
use crate::frames_ode::tridiag;

/// `γ(t) = base + Σ_j (A_j cos(ω_j t) + B_j sin(ω_j t))`.
struct TrigCurve<const M: usize> {
    base: SVector<f64, M>,
    terms: Vec<(f64, SVector<f64, M>, SVector<f64, M>)>,
}

impl<const M: usize> TrigCurve<M> {
    fn jet(&self, t: f64) -> [SVector<f64, M>; M] {
        std::array::from_fn(|k| {
            let mut acc = if k == 0 { self.base } else { SVector::zeros() };
            for (w, a, b) in &self.terms {
                let phase = w * t + k as f64 * PI / 2.0;
                let s = w.powi(k as i32);
                acc += a * (s * phase.cos()) + b * (s * phase.sin());
            }
            acc
        })
    }

    fn sample(&self, grid: Grid) -> Result<SampledCurve<M>> {
        SampledCurve::from_jet(grid, |t| self.jet(t))
    }
}

/// Radius `ρ ∈ (0, π/2]` of the circle of length `c = 2π sin ρ`.
pub fn sigma_radius(c: f64) -> Result<f64> {
    if !(c > 0.0 && c <= 2.0 * PI * (1.0 + 1e-15)) {
        return Err(Error::InvalidParameter(format!(
            "circle length c = {c} must lie in (0, 2π]"
        )));
    }
    Ok((c / (2.0 * PI)).min(1.0).asin())
}

/// Geodesic curvature `cot ρ` of `σ_c`.
pub fn sigma_curvature(c: f64) -> Result<f64> {
    let rho = sigma_radius(c)?;
    Ok(if rho == PI / 2.0 {
        0.0
    } else {
        rho.cos() / rho.sin()
    })
}

/// `σ_c^m(t) = σ_c(m t)`: the circle of length `c` with Frenet frame `I` at `t = 0`, run `m` times.
pub fn sigma(c: f64, m: f64, grid: Grid) -> Result<SampledCurve<3>> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "turn count m = {m} must be positive"
        )));
    }
    let rho = sigma_radius(c)?;
    let (s, co) = (rho.sin(), rho.cos());
    TrigCurve {
        base: SVector::<f64, 3>::new(co * co, 0.0, co * s),
        terms: vec![(
            2.0 * PI * m,
            SVector::<f64, 3>::new(s * s, 0.0, -co * s),
            SVector::<f64, 3>::new(0.0, s, 0.0),
        )],
    }
    .sample(grid)
}

/// Profile `(v, κ) = (m c, cot ρ)` of `σ_c^m`.
pub fn sigma_profile(c: f64, m: f64) -> Result<Constant<2>> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "turn count m = {m} must be positive"
        )));
    }
    Ok(Constant([m * c, sigma_curvature(c)?]))
}

fn check_xi(c: &[f64], a: &[f64]) -> Result<()> {
    let s: f64 = c.iter().map(|x| x * x).sum();
    if c.iter().any(|&x| !(x > 0.0)) || (s - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "coefficients {c:?} must be positive with unit sum of squares"
        )));
    }
    if a.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "frequencies {a:?} must be positive"
        )));
    }
    for i in 0..a.len() {
        for j in 0..i {
            if a[i] == a[j] {
                return Err(Error::InvalidParameter(format!(
                    "frequencies {a:?} must be distinct"
                )));
            }
        }
    }
    Ok(())
}

/// `ξ(t) = (c₀, c₁ cos a₁t, c₁ sin a₁t)` on S².
pub fn xi2(c: [f64; 2], a: f64, grid: Grid) -> Result<SampledCurve<3>> {
    check_xi(&c, &[a])?;
    TrigCurve {
        base: SVector::<f64, 3>::new(c[0], 0.0, 0.0),
        terms: vec![(
            a,
            SVector::<f64, 3>::new(0.0, c[1], 0.0),
            SVector::<f64, 3>::new(0.0, 0.0, c[1]),
        )],
    }
    .sample(grid)
}

/// `ξ(t) = (c₁ cos a₁t, c₁ sin a₁t, c₂ cos a₂t, c₂ sin a₂t)` on S³.
pub fn xi3(c: [f64; 2], a: [f64; 2], grid: Grid) -> Result<SampledCurve<4>> {
    check_xi(&c, &a)?;
    TrigCurve {
        base: Vector4::zeros(),
        terms: vec![
            (
                a[0],
                Vector4::new(c[0], 0.0, 0.0, 0.0),
                Vector4::new(0.0, c[0], 0.0, 0.0),
            ),
            (
                a[1],
                Vector4::new(0.0, 0.0, c[1], 0.0),
                Vector4::new(0.0, 0.0, 0.0, c[1]),
            ),
        ],
    }
    .sample(grid)
}

/// `t ↦ exp(tΛ) e₁` with derivatives `exp(tΛ) Λᵏ e₁`.
pub fn from_constant_lambda(lambda: &Matrix4<f64>, grid: Grid) -> Result<SampledCurve<4>> {
    let e1 = Vector4::new(1.0, 0.0, 0.0, 0.0);
    let powers: [Vector4<f64>; 4] = std::array::from_fn(|k| lambda.pow(k as u32) * e1);
    SampledCurve::from_jet(grid, |t| {
        let e = (lambda * t).exp();
        std::array::from_fn(|k| e * powers[k])
    })
}

/// Profile `(v, κ, τ)` of `γ₁^m`, the curve with `Λ = (π/2)·tridiag(m√3, 2m, m√3)` (`m = 1, 2, 4`).
pub fn gamma_family_profile(m: f64) -> Constant<3> {
    Constant([m * 3f64.sqrt() * PI / 2.0, 2.0 / 3f64.sqrt(), 1.0])
}

pub fn gamma_family_lambda(m: f64) -> Matrix4<f64> {
    let s = 3f64.sqrt();
    tridiag(&[m * s * PI / 2.0, m * PI, m * s * PI / 2.0])
}

/// The convex curve `γ₁¹ ∈ LS³(−𝟏, 𝐤)`.
pub fn gamma_1_1(grid: Grid) -> Result<SampledCurve<4>> {
    from_constant_lambda(&gamma_family_lambda(1.0), grid)
}

/// The convex curve `γ₁² ∈ LS³(𝟏, −𝟏)`.
pub fn gamma_1_2(grid: Grid) -> Result<SampledCurve<4>> {
    from_constant_lambda(&gamma_family_lambda(2.0), grid)
}

/// `ω₃ = γ₁⁴ ∈ LS³(𝟏, 𝟏)` from its closed-form coordinates.
pub fn omega3(grid: Grid) -> Result<SampledCurve<4>> {
    omega3_trig().sample(grid)
}

/// Closed-form coordinates of `ω₃` at `t`.
pub fn omega3_point(t: f64) -> Vector4<f64> {
    omega3_trig().jet(t)[0]
}

fn omega3_trig() -> TrigCurve<4> {
    let r = 3f64.sqrt() / 4.0;
    TrigCurve {
        base: Vector4::zeros(),
        terms: vec![
            (
                2.0 * PI,
                Vector4::new(0.75, 0.0, r, 0.0),
                Vector4::new(0.0, r, 0.0, 0.75),
            ),
            (
                6.0 * PI,
                Vector4::new(0.25, 0.0, -r, 0.0),
                Vector4::new(0.0, r, 0.0, -0.25),
            ),
        ],
    }
}

pub fn omega3_profile() -> Constant<3> {
    gamma_family_profile(4.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::sampled::{frenet_frame, SphereCurve};
    use crate::frames_ode::FrameCurve;
    use crate::spin_algebra::Spin4Element;

    #[test]
    fn sigma_great_circle() {
        let grid = Grid::new(64).unwrap();
        let c = sigma(2.0 * PI, 1.0, grid).unwrap();
        for i in 0..=64 {
            let a = 2.0 * PI * grid.t(i);
            assert!((c.point(i) - SVector::<f64, 3>::new(a.cos(), a.sin(), 0.0)).norm() < 1e-15);
        }
        assert!(sigma(7.0, 1.0, grid).is_err());
    }

    #[test]
    fn sigma_profile_matches_closed_form() {
        let grid = Grid::new(128).unwrap();
        for &c in &[PI / 2.0, PI, 1.5 * PI] {
            let p = sigma(c, 1.0, grid).unwrap().profile().unwrap();
            let k = sigma_curvature(c).unwrap();
            assert!(p.v().iter().all(|v| (v - c).abs() < 1e-8));
            assert!(p.kappa().iter().all(|x| (x - k).abs() < 1e-8));
        }
        assert!((sigma_curvature(PI).unwrap() - 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn omega3_endpoints_and_lambda() {
        assert!((omega3_point(0.0) - Vector4::new(1.0, 0.0, 0.0, 0.0)).norm() < 1e-15);
        assert!((omega3_point(0.25) - Vector4::new(0.0, 0.0, 0.0, 1.0)).norm() < 1e-15);
        let lam = gamma_family_lambda(4.0);
        let e1 = Vector4::new(1.0, 0.0, 0.0, 0.0);
        for k in 0..=20 {
            let t = k as f64 / 20.0;
            assert!(((lam * t).exp() * e1 - omega3_point(t)).norm() < 1e-12);
        }
    }

    #[test]
    fn xi_is_locally_convex() {
        let grid = Grid::new(128).unwrap();
        let s = 0.5f64.sqrt();
        let c = xi3([s, s], [1.0, 3.0], grid).unwrap();
        let r = c.local_convexity();
        assert!(r.convex && r.determinant_agrees);
        assert!(c.profile().unwrap().tau().iter().all(|&t| t > 0.0));
        let c2 = xi2([0.6, 0.8], 2.0, grid).unwrap();
        assert!(c2.local_convexity().convex);
        assert!(xi3([s, s], [1.0, 1.0], grid).is_err());
    }

    #[test]
    fn gamma_1_1_frame_and_profile() {
        let grid = Grid::new(256).unwrap();
        let c = gamma_1_1(grid).unwrap();
        let f: FrameCurve<4, Spin4Element> = frenet_frame(&c).unwrap();
        let lam = gamma_family_lambda(1.0);
        for i in (0..=256).step_by(32) {
            assert!((f.frames()[i] - (lam * grid.t(i)).exp()).amax() < 1e-10);
        }
        let p = c.profile().unwrap();
        let [v, k, t] = gamma_family_profile(1.0).0;
        assert!(p.v().iter().all(|x| (x - v).abs() < 1e-10));
        assert!(p.kappa().iter().all(|x| (x - k).abs() < 1e-10));
        assert!(p.tau().iter().all(|x| (x - t).abs() < 1e-10));
    }
}
