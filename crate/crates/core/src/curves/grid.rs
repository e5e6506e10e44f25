use crate::error::{Error, Result};

/// Uniform grid `t_i = i/n`, `i = 0..=n`, on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid {
    n: usize,
}

impl Grid {
    pub const MIN_INTERVALS: usize = 16;
    pub const DEFAULT_INTERVALS: usize = 1024;

    pub fn new(n: usize) -> Result<Self> {
        if n < Self::MIN_INTERVALS {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least {} intervals, got {n}",
                Self::MIN_INTERVALS
            )));
        }
        Ok(Self { n })
    }

    /// Number of intervals; there are `n + 1` samples.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn t(&self, i: usize) -> f64 {
        i as f64 / self.n as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n).map(|i| self.t(i)).collect()
    }

    /// Index of the grid point nearest to `t`, clamped to the grid.
    pub fn nearest(&self, t: f64) -> usize {
        ((t * self.n as f64).round().max(0.0) as usize).min(self.n)
    }

    /// Index `i` with `t_i ≤ t < t_{i+1}` (the last interval for `t = 1`).
    pub fn interval(&self, t: f64) -> usize {
        ((t * self.n as f64).floor().max(0.0) as usize).min(self.n - 1)
    }
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            n: Self::DEFAULT_INTERVALS,
        }
    }
}

/// Which one-sided limit to take at a discontinuity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}
