use nalgebra::{SMatrix, SVector};

use super::grid::Grid;
use super::profile::{CurvatureProfile2, CurvatureProfile3};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::frames_ode::FrameCurve;
use crate::linalg::{complete_basis, det};
use crate::spin_algebra::{Spin4Element, SpinCover, UnitQuaternion};

/// Samples of a curve on the unit sphere of `ℝ^M` (S² for `M = 3`, S³ for `M = 4`),
/// optionally with exact derivatives of orders `1..M`.
#[derive(Debug, Clone)]
pub struct SampledCurve<const M: usize> {
    grid: Grid,
    points: Vec<SVector<f64, M>>,
    derivatives: Option<Vec<Vec<SVector<f64, M>>>>,
}

impl<const M: usize> SampledCurve<M> {
    pub fn new(grid: Grid, points: Vec<SVector<f64, M>>) -> Result<Self> {
        if points.len() != grid.len() {
            return Err(Error::Shape(format!(
                "{} points on a grid of {} samples",
                points.len(),
                grid.len()
            )));
        }
        for (i, p) in points.iter().enumerate() {
            if !((p.norm() - 1.0).abs() <= Tolerances::DEFAULT.orthogonality) {
                return Err(Error::InvalidParameter(format!(
                    "point at t = {} has norm {}",
                    grid.t(i),
                    p.norm()
                )));
            }
        }
        Ok(Self {
            grid,
            points,
            derivatives: None,
        })
    }

    /// Attaches exact derivatives: `derivatives[k - 1][i]` is the `k`-th derivative at `t_i`.
    pub fn with_derivatives(mut self, derivatives: Vec<Vec<SVector<f64, M>>>) -> Result<Self> {
        if derivatives.len() != M - 1 || derivatives.iter().any(|d| d.len() != self.grid.len()) {
            return Err(Error::Shape(format!(
                "expected {} derivative arrays of length {}",
                M - 1,
                self.grid.len()
            )));
        }
        self.derivatives = Some(derivatives);
        Ok(self)
    }

    /// Samples `f(t) = [γ(t), γ′(t), …, γ^{(M−1)}(t)]`.
    pub fn from_jet(grid: Grid, f: impl Fn(f64) -> [SVector<f64, M>; M]) -> Result<Self> {
        let jets: Vec<_> = grid.times().into_iter().map(f).collect();
        let points = jets.iter().map(|j| j[0]).collect();
        let derivs = (1..M)
            .map(|k| jets.iter().map(|j| j[k]).collect())
            .collect();
        Self::new(grid, points)?.with_derivatives(derivs)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn points(&self) -> &[SVector<f64, M>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> SVector<f64, M> {
        self.points[i]
    }

    pub fn has_exact_derivatives(&self) -> bool {
        self.derivatives.is_some()
    }

    /// Drops exact derivatives so that finite differences are used.
    pub fn without_derivatives(mut self) -> Self {
        self.derivatives = None;
        self
    }

    /// `k`-th derivative at `t_i` (`0 ≤ k < M`): exact when available,
    /// otherwise a 7-point finite difference (one-sided near the ends).
    pub fn derivative(&self, k: usize, i: usize) -> SVector<f64, M> {
        if k == 0 {
            return self.points[i];
        }
        if let Some(d) = &self.derivatives {
            return d[k - 1][i];
        }
        let n = self.grid.n();
        let start = i.saturating_sub(3).min(n - 6);
        let nodes: Vec<f64> = (start..start + 7).map(|j| j as f64).collect();
        let w = fornberg_weights(i as f64, &nodes, k);
        let scale = (n as f64).powi(k as i32);
        let mut acc = SVector::<f64, M>::zeros();
        for (j, wj) in w[k].iter().enumerate() {
            acc += self.points[start + j] * *wj;
        }
        acc * scale
    }

    /// Speeds `‖γ′(t_i)‖`.
    pub fn speed(&self) -> Vec<f64> {
        (0..self.grid.len())
            .map(|i| self.derivative(1, i).norm())
            .collect()
    }
}

/// Finite-difference weights (Fornberg): `w[k][j]` is the weight of node `j` in
/// the approximation of the `k`-th derivative at `x0`.
pub fn fornberg_weights(x0: f64, nodes: &[f64], order: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; order + 1];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Outcome of a local convexity test; `witness` is the first failing time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexityReport {
    pub convex: bool,
    pub witness: Option<f64>,
    /// Whether the determinant criterion `det(γ, γ′, …) > 0` gave the same verdict.
    pub determinant_agrees: bool,
}

/// Gram–Schmidt on `(γ, γ′, …, γ^{(M−2)})` completed to a positive basis.
fn frame_at<const M: usize>(curve: &SampledCurve<M>, i: usize) -> Result<SMatrix<f64, M, M>> {
    let tol = Tolerances::DEFAULT.curvature_zero;
    let mut q = SMatrix::<f64, M, M>::zeros();
    for k in 0..M - 1 {
        let mut v = curve.derivative(k, i);
        let scale = v.norm();
        for _ in 0..2 {
            for c in 0..k {
                let d = q.column(c).dot(&v);
                v -= q.column(c) * d;
            }
        }
        let r = v.norm();
        if !(r > tol * scale.max(f64::MIN_POSITIVE)) {
            return Err(Error::NonGeneric { t: curve.grid.t(i) });
        }
        q.set_column(k, &(v / r));
    }
    complete_basis(&mut q, M - 1);
    Ok(q)
}

/// Frenet frame curve, lifted continuously to the spin group starting from the
/// lift of the initial frame nearest to `𝟏`.
pub fn frenet_frame<const M: usize, S: SpinCover<M>>(
    curve: &SampledCurve<M>,
) -> Result<FrameCurve<M, S>> {
    let frames = (0..curve.grid.len())
        .map(|i| frame_at(curve, i))
        .collect::<Result<Vec<_>>>()?;
    let mut spin = Vec::with_capacity(frames.len());
    let mut hint = S::identity();
    for f in &frames {
        hint = S::lift(f, &hint)?;
        spin.push(hint);
    }
    FrameCurve::new(curve.grid, frames, spin)
}

/// Curves whose intrinsic description is a curvature profile.
pub trait SphereCurve {
    type Profile;
    type Spin;
    /// `(v, κ)` on S², `(v, κ, τ)` on S³.
    fn profile(&self) -> Result<Self::Profile>;
    fn local_convexity(&self) -> ConvexityReport;
}

fn first_failure(grid: &Grid, ok: impl Fn(usize) -> bool) -> Option<f64> {
    (0..grid.len()).find(|&i| !ok(i)).map(|i| grid.t(i))
}

impl SphereCurve for SampledCurve<3> {
    type Profile = CurvatureProfile2;
    type Spin = UnitQuaternion;

    fn profile(&self) -> Result<CurvatureProfile2> {
        let n = self.grid.len();
        let mut v = Vec::with_capacity(n);
        let mut kappa = Vec::with_capacity(n);
        for i in 0..n {
            let d1 = self.derivative(1, i);
            let speed = d1.norm();
            if !(speed > 0.0) {
                return Err(Error::NonGeneric { t: self.grid.t(i) });
            }
            let m =
                SMatrix::<f64, 3, 3>::from_columns(&[self.points[i], d1, self.derivative(2, i)]);
            v.push(speed);
            kappa.push(det(&m) / speed.powi(3));
        }
        CurvatureProfile2::from_columns(self.grid, [&v, &kappa])
    }

    fn local_convexity(&self) -> ConvexityReport {
        let tol = Tolerances::DEFAULT.curvature_zero;
        match self.profile() {
            Ok(p) => {
                let k = p.kappa();
                let witness = first_failure(&self.grid, |i| k[i] > tol);
                ConvexityReport {
                    convex: witness.is_none(),
                    witness,
                    determinant_agrees: true,
                }
            }
            Err(Error::NonGeneric { t }) => ConvexityReport {
                convex: false,
                witness: Some(t),
                determinant_agrees: true,
            },
            Err(_) => ConvexityReport {
                convex: false,
                witness: Some(0.0),
                determinant_agrees: true,
            },
        }
    }
}

impl SphereCurve for SampledCurve<4> {
    type Profile = CurvatureProfile3;
    type Spin = Spin4Element;

    fn profile(&self) -> Result<CurvatureProfile3> {
        let n = self.grid.len();
        let (mut v, mut kappa, mut tau) = (
            Vec::with_capacity(n),
            Vec::with_capacity(n),
            Vec::with_capacity(n),
        );
        for i in 0..n {
            let f = frame_at(self, i)?;
            let d1 = self.derivative(1, i);
            let d2 = self.derivative(2, i);
            let d3 = self.derivative(3, i);
            let speed = d1.norm();
            let k = f.column(2).dot(&d2) / (speed * speed);
            if !(k > Tolerances::DEFAULT.curvature_zero) {
                return Err(Error::NonGeneric { t: self.grid.t(i) });
            }
            v.push(speed);
            kappa.push(k);
            tau.push(f.column(3).dot(&d3) / (speed.powi(3) * k));
        }
        CurvatureProfile3::from_columns(self.grid, [&v, &kappa, &tau])
    }

    fn local_convexity(&self) -> ConvexityReport {
        let tol = Tolerances::DEFAULT.curvature_zero;
        let det_witness = first_failure(&self.grid, |i| {
            let m = SMatrix::<f64, 4, 4>::from_columns(&[
                self.points[i],
                self.derivative(1, i),
                self.derivative(2, i),
                self.derivative(3, i),
            ]);
            det(&m) > 0.0
        });
        match self.profile() {
            Ok(p) => {
                let t = p.tau();
                let witness = first_failure(&self.grid, |i| t[i] > tol);
                ConvexityReport {
                    convex: witness.is_none(),
                    witness,
                    determinant_agrees: witness.is_none() == det_witness.is_none(),
                }
            }
            Err(e) => {
                let t = if let Error::NonGeneric { t } = e {
                    t
                } else {
                    0.0
                };
                ConvexityReport {
                    convex: false,
                    witness: Some(t),
                    determinant_agrees: det_witness.is_some(),
                }
            }
        }
    }
}

/// Speed and curvature data of a sampled curve (`(v, κ)` on S², `(v, κ, τ)` on S³).
pub fn curvature_torsion<C: SphereCurve>(curve: &C) -> Result<C::Profile> {
    curve.profile()
}

pub fn is_locally_convex<C: SphereCurve>(curve: &C) -> ConvexityReport {
    curve.local_convexity()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fornberg_central_second_derivative() {
        let w = fornberg_weights(0.0, &[-1.0, 0.0, 1.0], 2);
        assert_eq!(w[2], vec![1.0, -2.0, 1.0]);
        assert_eq!(w[1], vec![-0.5, 0.0, 0.5]);
    }

    #[test]
    fn finite_differences_on_a_circle() {
        let grid = Grid::new(256).unwrap();
        let pts = grid
            .times()
            .into_iter()
            .map(|t| {
                let a = 2.0 * std::f64::consts::PI * t;
                SVector::<f64, 3>::new(a.cos(), a.sin(), 0.0)
            })
            .collect();
        let c = SampledCurve::new(grid, pts).unwrap();
        for i in [0, 1, 100, 255, 256] {
            let a = 2.0 * std::f64::consts::PI * grid.t(i);
            let exact = SVector::<f64, 3>::new(-a.sin(), a.cos(), 0.0) * 2.0 * std::f64::consts::PI;
            assert!((c.derivative(1, i) - exact).norm() < 1e-6);
        }
        let p = c.profile().unwrap();
        assert!(p.kappa().iter().all(|k| k.abs() < 1e-5));
        assert!(!c.local_convexity().convex);
    }
}
