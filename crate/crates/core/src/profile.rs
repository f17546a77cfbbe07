//! Radially sampled scalar functions with local cubic interpolation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Real function of radius on a strictly increasing grid.
///
/// Evaluation between nodes uses the cubic Lagrange polynomial through the
/// four nearest nodes (one-sided at the ends), so node values are
/// reproduced exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile<T = f64> {
    grid: Vec<T>,
    values: Vec<T>,
}

impl<T: Real> RadialProfile<T> {
    pub fn new(grid: Vec<T>, values: Vec<T>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::DimensionError { expected: grid.len(), found: values.len() });
        }
        if grid.len() < 4 {
            return Err(Error::InvalidArgument("profile needs at least 4 samples".into()));
        }
        if grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument("profile grid must be strictly increasing".into()));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite profile value at index {bad}")));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` on `n` uniformly spaced radii over `[r0, r1]`.
    pub fn from_fn(r0: T, r1: T, n: usize, f: impl Fn(T) -> T) -> Result<Self> {
        let grid = uniform(r0, r1, n);
        let values = grid.iter().map(|&r| f(r)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &[T] {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn r_min(&self) -> T {
        self.grid[0]
    }

    pub fn r_max(&self) -> T {
        self.grid[self.grid.len() - 1]
    }

    pub fn covers(&self, r: T) -> bool {
        r >= self.r_min() && r <= self.r_max()
    }

    /// Cubic interpolation at `r`; errors outside the sampled support.
    pub fn eval(&self, r: T) -> Result<T> {
        if !self.covers(r) {
            return Err(Error::DomainMismatch {
                needed: r.to_f64_lossy(),
                available: self.r_max().to_f64_lossy(),
            });
        }
        Ok(self.eval_unchecked(r))
    }

    fn eval_unchecked(&self, r: T) -> T {
        let n = self.grid.len();
        // index of the last node <= r
        let i = match self.grid.binary_search_by(|g| g.partial_cmp(&r).unwrap()) {
            Ok(i) => return self.values[i],
            Err(i) => i.saturating_sub(1),
        };
        let start = i.saturating_sub(1).min(n - 4);
        let xs = &self.grid[start..start + 4];
        let ys = &self.values[start..start + 4];
        let mut acc = T::zero();
        for j in 0..4 {
            let mut w = T::one();
            for m in 0..4 {
                if m != j {
                    w *= (r - xs[m]) / (xs[j] - xs[m]);
                }
            }
            acc += w * ys[j];
        }
        acc
    }

    /// Applies `f` to every sample value.
    pub fn map(&self, f: impl Fn(T, T) -> T) -> Self {
        let values = self.grid.iter().zip(&self.values).map(|(&r, &v)| f(r, v)).collect();
        Self { grid: self.grid.clone(), values }
    }

    /// Trapezoid integral of `f(r, value)` over the sampled support.
    pub fn trapezoid(&self, f: impl Fn(T, T) -> T) -> T {
        let half = T::lit(0.5);
        let mut acc = T::zero();
        let mut prev = f(self.grid[0], self.values[0]);
        for i in 1..self.grid.len() {
            let cur = f(self.grid[i], self.values[i]);
            acc += half * (self.grid[i] - self.grid[i - 1]) * (prev + cur);
            prev = cur;
        }
        acc
    }

    /// Number of sign changes of the samples with radius strictly inside `(0, r_limit)`.
    pub fn sign_changes_below(&self, r_limit: T) -> usize {
        let mut count = 0;
        let mut last_sign = 0i8;
        for (&r, &v) in self.grid.iter().zip(&self.values) {
            if r <= T::zero() {
                continue;
            }
            if r >= r_limit {
                break;
            }
            let s = if v > T::zero() {
                1
            } else if v < T::zero() {
                -1
            } else {
                0
            };
            if s != 0 {
                if last_sign != 0 && s != last_sign {
                    count += 1;
                }
                last_sign = s;
            }
        }
        count
    }
}

pub(crate) fn uniform<T: Real>(r0: T, r1: T, n: usize) -> Vec<T> {
    let h = (r1 - r0) / T::from_usize_lossy(n - 1);
    (0..n)
        .map(|i| if i == n - 1 { r1 } else { r0 + T::from_usize_lossy(i) * h })
        .collect()
}
