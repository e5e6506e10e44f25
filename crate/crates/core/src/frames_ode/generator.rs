use nalgebra::SMatrix;

use crate::curves::{interpolate, Grid, ProfileFn, Side};
use crate::error::{Error, Result};
use crate::frames_ode::tridiag;

/// A logarithmic derivative `t ↦ Λ(t) ∈ so_M`, piecewise smooth with one-sided
/// values at its breakpoints.
pub trait Generator<const M: usize> {
    fn lambda(&self, t: f64, side: Side) -> SMatrix<f64, M, M>;

    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantGenerator<const M: usize>(pub SMatrix<f64, M, M>);

impl<const M: usize> Generator<M> for ConstantGenerator<M> {
    fn lambda(&self, _t: f64, _side: Side) -> SMatrix<f64, M, M> {
        self.0
    }
}

/// `Λ = tridiag(v, vκ)` for a profile on S², `tridiag(v, vκ, vτ)` on S³.
#[derive(Debug, Clone, Copy)]
pub struct ProfileGenerator<P>(pub P);

impl<P: ProfileFn<2>> Generator<3> for ProfileGenerator<P> {
    fn lambda(&self, t: f64, side: Side) -> SMatrix<f64, 3, 3> {
        let [v, k] = self.0.eval(t, side);
        tridiag(&[v, v * k])
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.0.breakpoints()
    }
}

impl<P: ProfileFn<3>> Generator<4> for ProfileGenerator<P> {
    fn lambda(&self, t: f64, side: Side) -> SMatrix<f64, 4, 4> {
        let [v, k, tau] = self.0.eval(t, side);
        tridiag(&[v, v * k, v * tau])
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.0.breakpoints()
    }
}

/// Grid samples of `Λ`, interpolated by piecewise cubics.
#[derive(Debug, Clone)]
pub struct SampledGenerator<const M: usize> {
    grid: Grid,
    values: Vec<SMatrix<f64, M, M>>,
}

impl<const M: usize> SampledGenerator<M> {
    pub fn new(grid: Grid, values: Vec<SMatrix<f64, M, M>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!(
                "{} samples on a grid of {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn values(&self) -> &[SMatrix<f64, M, M>] {
        &self.values
    }
}

impl<const M: usize> Generator<M> for SampledGenerator<M> {
    fn lambda(&self, t: f64, side: Side) -> SMatrix<f64, M, M> {
        interpolate(&self.grid, &self.values, &[], t, side)
    }
}

impl<const M: usize, G: Generator<M> + ?Sized> Generator<M> for &G {
    fn lambda(&self, t: f64, side: Side) -> SMatrix<f64, M, M> {
        (**self).lambda(t, side)
    }
    fn breakpoints(&self) -> Vec<f64> {
        (**self).breakpoints()
    }
}
