use std::fmt;
use std::sync::Arc;

use nalgebra::SVector;

use super::grid::{Grid, Side};
use crate::error::{Error, Result};

/// A piecewise smooth function `[0, 1] → ℝ^C`, evaluated with one-sided limits at
/// its breakpoints. Profiles of curves use the columns `(v, κ)` or `(v, κ, τ)`.
pub trait ProfileFn<const C: usize>: Send + Sync {
    fn eval(&self, t: f64, side: Side) -> [f64; C];

    /// Interior points where the function may jump.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl<const C: usize, P: ProfileFn<C> + ?Sized> ProfileFn<C> for Arc<P> {
    fn eval(&self, t: f64, side: Side) -> [f64; C] {
        (**self).eval(t, side)
    }
    fn breakpoints(&self) -> Vec<f64> {
        (**self).breakpoints()
    }
}

impl<const C: usize, P: ProfileFn<C> + ?Sized> ProfileFn<C> for &P {
    fn eval(&self, t: f64, side: Side) -> [f64; C] {
        (**self).eval(t, side)
    }
    fn breakpoints(&self) -> Vec<f64> {
        (**self).breakpoints()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant<const C: usize>(pub [f64; C]);

impl<const C: usize> ProfileFn<C> for Constant<C> {
    fn eval(&self, _t: f64, _side: Side) -> [f64; C] {
        self.0
    }
}

/// A smooth profile given by a closure.
pub struct FnProfile<F>(pub F);

impl<const C: usize, F: Fn(f64) -> [f64; C] + Send + Sync> ProfileFn<C> for FnProfile<F> {
    fn eval(&self, t: f64, _side: Side) -> [f64; C] {
        (self.0)(t)
    }
}

pub type SharedProfile<const C: usize> = Arc<dyn ProfileFn<C>>;

/// Concatenation of profiles on consecutive parameter intervals.
#[derive(Clone)]
pub struct PiecewiseProfile<const C: usize> {
    knots: Vec<f64>,
    pieces: Vec<SharedProfile<C>>,
}

impl<const C: usize> PiecewiseProfile<C> {
    /// `knots` must increase from `0` to `1`, one more than `pieces`.
    pub fn new(knots: Vec<f64>, pieces: Vec<SharedProfile<C>>) -> Result<Self> {
        if knots.len() != pieces.len() + 1 || pieces.is_empty() {
            return Err(Error::Shape(format!(
                "{} knots for {} pieces",
                knots.len(),
                pieces.len()
            )));
        }
        if knots.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter(format!(
                "knots {knots:?} are not increasing"
            )));
        }
        Ok(Self { knots, pieces })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    fn piece(&self, t: f64, side: Side) -> usize {
        let last = self.pieces.len() - 1;
        let mut k = match side {
            Side::Right => self.knots[1..].iter().take_while(|&&x| x <= t).count(),
            Side::Left => self.knots[1..].iter().take_while(|&&x| x < t).count(),
        };
        k = k.min(last);
        // skip empty pieces
        while k < last && self.knots[k + 1] <= self.knots[k] && side == Side::Right {
            k += 1;
        }
        k
    }
}

impl<const C: usize> ProfileFn<C> for PiecewiseProfile<C> {
    fn eval(&self, t: f64, side: Side) -> [f64; C] {
        self.pieces[self.piece(t, side)].eval(t, side)
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.knots[1..self.knots.len() - 1].to_vec();
        for p in &self.pieces {
            b.extend(p.breakpoints());
        }
        b.retain(|&x| x > 0.0 && x < 1.0);
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }
}

impl<const C: usize> fmt::Debug for PiecewiseProfile<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PiecewiseProfile")
            .field("knots", &self.knots)
            .finish()
    }
}

/// `t ↦ p(φ(t))` for an increasing affine `φ(t) = a + b t`, with speeds (column 0) scaled by `b`.
pub struct Reparametrized<const C: usize> {
    inner: SharedProfile<C>,
    offset: f64,
    rate: f64,
}

impl<const C: usize> Reparametrized<C> {
    pub fn new(inner: SharedProfile<C>, offset: f64, rate: f64) -> Self {
        Self {
            inner,
            offset,
            rate,
        }
    }
}

impl<const C: usize> ProfileFn<C> for Reparametrized<C> {
    fn eval(&self, t: f64, side: Side) -> [f64; C] {
        let mut x = self.inner.eval(self.offset + self.rate * t, side);
        x[0] *= self.rate;
        x
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.inner
            .breakpoints()
            .into_iter()
            .map(|s| (s - self.offset) / self.rate)
            .collect()
    }
}

/// Lagrange weights for the nodes `xs` evaluated at `x`.
fn lagrange_weights(xs: &[f64], x: f64) -> Vec<f64> {
    xs.iter()
        .enumerate()
        .map(|(j, &xj)| {
            xs.iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, &xk)| (x - xk) / (xj - xk))
                .product()
        })
        .collect()
}

/// Piecewise cubic interpolation of grid samples that may jump at grid points.
///
/// `left` lists `(index, left limit)` for every jump; the main sample at such an
/// index is the right limit.
pub(crate) fn interpolate<T>(
    grid: &Grid,
    values: &[T],
    left: &[(usize, T)],
    t: f64,
    side: Side,
) -> T
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let n = grid.n();
    let x = (t * n as f64).clamp(0.0, n as f64);
    // segment [a, b] between jumps containing x, honouring the side at a jump
    let mut a = 0;
    let mut b = n;
    for &(j, _) in left {
        let jf = j as f64;
        if jf < x || (jf == x && side == Side::Right) {
            a = a.max(j);
        } else if jf > x || (jf == x && side == Side::Left) {
            b = b.min(j);
            break;
        }
    }
    let sample = |i: usize| -> T {
        if i == b {
            if let Some(&(_, v)) = left.iter().find(|&&(j, _)| j == b) {
                return v;
            }
        }
        values[i]
    };
    let count = (b - a + 1).min(4);
    let i = (x.floor() as usize).clamp(a, b.saturating_sub(1).max(a));
    let start = i.saturating_sub(1).max(a).min(b + 1 - count);
    let nodes: Vec<f64> = (start..start + count).map(|k| k as f64).collect();
    let w = lagrange_weights(&nodes, x);
    let mut acc = sample(start) * w[0];
    for (k, &wk) in w.iter().enumerate().skip(1) {
        acc = acc + sample(start + k) * wk;
    }
    acc
}

/// Grid samples of a profile, optionally backed by the exact function they were taken from.
///
/// Columns are `(v, κ)` for curves on S² and `(v, κ, τ)` for curves on S³.
#[derive(Clone)]
pub struct SampledProfile<const C: usize> {
    grid: Grid,
    values: Vec<SVector<f64, C>>,
    left_limits: Vec<(usize, SVector<f64, C>)>,
    source: Option<SharedProfile<C>>,
}

pub type CurvatureProfile2 = SampledProfile<2>;
pub type CurvatureProfile3 = SampledProfile<3>;

impl<const C: usize> SampledProfile<C> {
    /// Builds a profile from column arrays of length `n + 1`.
    pub fn from_columns(grid: Grid, columns: [&[f64]; C]) -> Result<Self> {
        for col in &columns {
            if col.len() != grid.len() {
                return Err(Error::Shape(format!(
                    "column of length {} on a grid of {} samples",
                    col.len(),
                    grid.len()
                )));
            }
        }
        let values = (0..grid.len())
            .map(|i| SVector::<f64, C>::from_fn(|c, _| columns[c][i]))
            .collect();
        let p = Self {
            grid,
            values,
            left_limits: Vec::new(),
            source: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// Samples `f` on the grid (right limits, with left limits recorded at
    /// breakpoints falling on grid points) and keeps `f` for exact evaluation.
    pub fn from_fn(grid: Grid, f: SharedProfile<C>) -> Result<Self> {
        let values: Vec<SVector<f64, C>> = (0..grid.len())
            .map(|i| {
                SVector::from(f.eval(
                    grid.t(i),
                    if i == grid.n() {
                        Side::Left
                    } else {
                        Side::Right
                    },
                ))
            })
            .collect();
        let mut left_limits = Vec::new();
        for b in f.breakpoints() {
            let j = grid.nearest(b);
            if j > 0 && j < grid.n() && (grid.t(j) - b).abs() < 1e-14 {
                let l = SVector::from(f.eval(b, Side::Left));
                if l != values[j] {
                    left_limits.push((j, l));
                }
            }
        }
        left_limits.sort_by_key(|&(j, _)| j);
        left_limits.dedup_by_key(|&mut (j, _)| j);
        let p = Self {
            grid,
            values,
            left_limits,
            source: Some(f),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn constant(grid: Grid, value: [f64; C]) -> Result<Self> {
        Self::from_fn(grid, Arc::new(Constant(value)))
    }

    fn validate(&self) -> Result<()> {
        for (i, v) in self.values.iter().enumerate() {
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "non-finite profile value at t = {}",
                    self.grid.t(i)
                )));
            }
            if v[0] <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "speed {} is not positive at t = {}",
                    v[0],
                    self.grid.t(i)
                )));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn source(&self) -> Option<&SharedProfile<C>> {
        self.source.as_ref()
    }

    /// Attaches `source` as the exact function behind the samples. The caller
    /// guarantees the samples were taken from it.
    pub fn with_source(mut self, source: SharedProfile<C>) -> Self {
        self.source = Some(source);
        self
    }

    /// Drops the exact source, keeping only samples.
    pub fn into_samples(mut self) -> Self {
        self.source = None;
        self
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        self.values.iter().map(|v| v[c]).collect()
    }

    pub fn value(&self, i: usize) -> [f64; C] {
        self.values[i].into()
    }

    /// Left limits at grid points where the samples jump.
    pub fn left_limits(&self) -> impl Iterator<Item = (usize, [f64; C])> + '_ {
        self.left_limits.iter().map(|&(j, v)| (j, v.into()))
    }

    pub fn with_left_limits(mut self, limits: Vec<(usize, [f64; C])>) -> Result<Self> {
        let mut l: Vec<(usize, SVector<f64, C>)> = limits
            .into_iter()
            .map(|(j, v)| (j, SVector::from(v)))
            .collect();
        l.sort_by_key(|&(j, _)| j);
        if l.iter().any(|&(j, _)| j == 0 || j >= self.grid.n()) {
            return Err(Error::InvalidParameter(
                "left limits must sit at interior grid points".into(),
            ));
        }
        self.left_limits = l;
        Ok(self)
    }

    pub fn v(&self) -> Vec<f64> {
        self.column(0)
    }

    pub fn kappa(&self) -> Vec<f64> {
        self.column(1)
    }

    /// Applies a pointwise map to the samples, the left limits and the source.
    pub fn map<const D: usize>(
        &self,
        f: impl Fn([f64; C]) -> [f64; D] + Send + Sync + Clone + 'static,
    ) -> Result<SampledProfile<D>> {
        let g = f.clone();
        let values = self
            .values
            .iter()
            .map(|v| SVector::from(f((*v).into())))
            .collect();
        let left_limits = self
            .left_limits
            .iter()
            .map(|(j, v)| (*j, SVector::from(f((*v).into()))))
            .collect();
        let source = self
            .source
            .clone()
            .map(|s| Arc::new(Mapped { inner: s, f: g }) as SharedProfile<D>);
        let p = SampledProfile {
            grid: self.grid,
            values,
            left_limits,
            source,
        };
        p.validate()?;
        Ok(p)
    }

    /// Largest absolute difference between corresponding samples.
    pub fn max_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).amax())
            .fold(0.0, f64::max)
    }
}

impl SampledProfile<3> {
    pub fn tau(&self) -> Vec<f64> {
        self.column(2)
    }
}

struct Mapped<const C: usize, F> {
    inner: SharedProfile<C>,
    f: F,
}

impl<const C: usize, const D: usize, F: Fn([f64; C]) -> [f64; D] + Send + Sync> ProfileFn<D>
    for Mapped<C, F>
{
    fn eval(&self, t: f64, side: Side) -> [f64; D] {
        (self.f)(self.inner.eval(t, side))
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints()
    }
}

impl<const C: usize> ProfileFn<C> for SampledProfile<C> {
    fn eval(&self, t: f64, side: Side) -> [f64; C] {
        match &self.source {
            Some(s) => s.eval(t, side),
            None => interpolate(&self.grid, &self.values, &self.left_limits, t, side).into(),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match &self.source {
            Some(s) => s.breakpoints(),
            None => self
                .left_limits
                .iter()
                .map(|&(j, _)| self.grid.t(j))
                .collect(),
        }
    }
}

impl<const C: usize> fmt::Debug for SampledProfile<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledProfile")
            .field("grid", &self.grid)
            .field("jumps", &self.left_limits.len())
            .field("exact", &self.source.is_some())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_interpolation_is_exact_on_cubics() {
        let grid = Grid::new(32).unwrap();
        let f = |t: f64| 1.0 + t - 2.0 * t * t + 3.0 * t * t * t;
        let values: Vec<f64> = grid.times().into_iter().map(f).collect();
        for &t in &[0.0, 0.01, 0.37, 0.5, 0.999, 1.0] {
            let y = interpolate(&grid, &values, &[], t, Side::Right);
            assert!((y - f(t)).abs() < 1e-13, "{t}");
        }
    }

    #[test]
    fn interpolation_respects_jumps() {
        let grid = Grid::new(32).unwrap();
        let j = 16;
        let values: Vec<f64> = (0..=32)
            .map(|i| if i >= j { 5.0 + i as f64 } else { i as f64 })
            .collect();
        let left = [(j, j as f64)];
        assert_eq!(interpolate(&grid, &values, &left, 0.5, Side::Left), 16.0);
        assert_eq!(interpolate(&grid, &values, &left, 0.5, Side::Right), 21.0);
        let y = interpolate(&grid, &values, &left, 0.49, Side::Right);
        assert!((y - 0.49 * 32.0).abs() < 1e-12);
    }

    #[test]
    fn piecewise_sides() {
        let p = PiecewiseProfile::new(
            vec![0.0, 0.5, 1.0],
            vec![
                Arc::new(Constant([1.0, 0.0])),
                Arc::new(Constant([2.0, 1.0])),
            ],
        )
        .unwrap();
        assert_eq!(p.eval(0.5, Side::Left), [1.0, 0.0]);
        assert_eq!(p.eval(0.5, Side::Right), [2.0, 1.0]);
        assert_eq!(p.breakpoints(), vec![0.5]);
        let s = SampledProfile::from_fn(Grid::new(16).unwrap(), Arc::new(p)).unwrap();
        assert_eq!(s.left_limits().collect::<Vec<_>>(), vec![(8, [1.0, 0.0])]);
    }
}
