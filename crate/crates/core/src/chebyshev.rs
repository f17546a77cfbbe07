//! Chebyshev collocation on `r ∈ [0, L]`: nodes, differentiation matrices,
//! Dirichlet trimming, Clenshaw–Curtis quadrature and resampling.
//!
//! Nodes are `x_k = cos(kπ/N)` in descending order and map to radii through
//! `r = L(x + 1)/2`, so `r_0 = L` and `r_N = 0`.

use crate::dense::Matrix;
use crate::error::{Error, Result};
use crate::profile::RadialProfile;
use crate::scalar::Real;

#[derive(Clone, Debug)]
pub struct ChebyshevGrid<T = f64> {
    n: usize,
    length: T,
    x: Vec<T>,
    r: Vec<T>,
    d: Matrix<T>,
    d2: Matrix<T>,
    d2_trimmed: Matrix<T>,
    weights: Vec<T>,
}

/// Chebyshev points `cos(kπ/N)`, `k = 0..=N`, evaluated in the symmetric
/// sine form so that `x_{N-k} = -x_k` holds exactly.
pub fn chebyshev_points<T: Real>(n: usize) -> Vec<T> {
    let nf = T::from_usize_lossy(n);
    (0..=n)
        .map(|k| {
            let m = T::from_usize_lossy(n) - T::lit(2.0) * T::from_usize_lossy(k);
            (T::PI() * m / (T::lit(2.0) * nf)).sin()
        })
        .collect()
}

/// First-derivative collocation matrix on the `N + 1` Chebyshev points.
///
/// Off-diagonal entries use the explicit formula; each diagonal entry is the
/// negated sum of its row so that constants differentiate to zero.
pub fn differentiation_matrix<T: Real>(n: usize) -> Matrix<T> {
    assert!(n >= 1, "differentiation matrix needs N >= 1");
    let nf = T::from_usize_lossy(n);
    let two = T::lit(2.0);
    let c = |i: usize| {
        let base = if i == 0 || i == n { two } else { T::one() };
        if i.is_multiple_of(2) {
            base
        } else {
            -base
        }
    };
    let mut d = Matrix::zeros(n + 1, n + 1);
    for i in 0..=n {
        let mut row_sum = T::zero();
        for j in 0..=n {
            if i == j {
                continue;
            }
            // x_i - x_j = 2 sin((i+j)π/2N) sin((j-i)π/2N)
            let fi = T::from_usize_lossy(i);
            let fj = T::from_usize_lossy(j);
            let diff = two * (T::PI() * (fi + fj) / (two * nf)).sin() * (T::PI() * (fj - fi) / (two * nf)).sin();
            let v = c(i) / c(j) / diff;
            d[(i, j)] = v;
            row_sum += v;
        }
        d[(i, i)] = -row_sum;
    }
    d
}

/// Clenshaw–Curtis weights on `[-1, 1]` for the Chebyshev points.
pub fn clenshaw_curtis_weights<T: Real>(n: usize) -> Vec<T> {
    let nf = T::from_usize_lossy(n);
    let one = T::one();
    let two = T::lit(2.0);
    let mut w = vec![T::zero(); n + 1];
    let theta = |k: usize| T::PI() * T::from_usize_lossy(k) / nf;
    if n.is_multiple_of(2) {
        w[0] = one / (nf * nf - one);
        w[n] = w[0];
    } else {
        w[0] = one / (nf * nf);
        w[n] = w[0];
    }
    for i in 1..n {
        let mut v = one;
        if n.is_multiple_of(2) {
            for k in 1..n / 2 {
                let kf = T::from_usize_lossy(k);
                v -= two * (two * kf * theta(i)).cos() / (T::lit(4.0) * kf * kf - one);
            }
            v -= (nf * theta(i)).cos() / (nf * nf - one);
        } else {
            for k in 1..=(n - 1) / 2 {
                let kf = T::from_usize_lossy(k);
                v -= two * (two * kf * theta(i)).cos() / (T::lit(4.0) * kf * kf - one);
            }
        }
        w[i] = two * v / nf;
    }
    w
}

impl<T: Real> ChebyshevGrid<T> {
    pub fn new(n: usize, length: T) -> Result<Self> {
        if n < 2 {
            return Err(Error::GridTooSmall(n));
        }
        if !(length > T::zero()) || !length.is_finite() {
            return Err(Error::InvalidArgument(format!("domain length {length} must be positive")));
        }
        let x = chebyshev_points::<T>(n);
        let half_len = length / T::lit(2.0);
        let r = x.iter().map(|&xk| half_len * (xk + T::one())).collect();
        let d = differentiation_matrix::<T>(n);
        let jac = T::lit(2.0) / length;
        let d2 = (&d * &d).scale(jac * jac);
        let d2_trimmed = d2.block(1, 1, n - 1, n - 1);
        let weights = clenshaw_curtis_weights::<T>(n);
        Ok(Self { n, length, x, r, d, d2, d2_trimmed, weights })
    }

    /// Polynomial degree `N`.
    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn interior_len(&self) -> usize {
        self.n - 1
    }

    pub fn x(&self) -> &[T] {
        &self.x
    }

    /// Mapped radii, descending from `L` to `0`.
    pub fn r(&self) -> &[T] {
        &self.r
    }

    pub fn interior_r(&self) -> &[T] {
        &self.r[1..self.n]
    }

    /// First-derivative matrix in `x`.
    pub fn d(&self) -> &Matrix<T> {
        &self.d
    }

    /// First-derivative matrix in `r`.
    pub fn d_r(&self) -> Matrix<T> {
        self.d.scale(T::lit(2.0) / self.length)
    }

    /// Second-derivative matrix in `r` on all nodes.
    pub fn d2(&self) -> &Matrix<T> {
        &self.d2
    }

    /// Second-derivative matrix in `r` with boundary rows and columns removed.
    pub fn d2_trimmed(&self) -> &Matrix<T> {
        &self.d2_trimmed
    }

    /// Clenshaw–Curtis weights on `[-1, 1]`.
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Weights for `∫_0^L f dr` restricted to interior nodes.
    pub fn interior_weights(&self) -> Vec<T> {
        let s = self.length / T::lit(2.0);
        self.weights[1..self.n].iter().map(|&w| w * s).collect()
    }

    /// `∫_0^L f dr ≈ (L/2) Σ w_k f(r_k)` for values on all `N + 1` nodes.
    pub fn quad(&self, values: &[T]) -> Result<T> {
        if values.len() != self.n + 1 {
            return Err(Error::DimensionError { expected: self.n + 1, found: values.len() });
        }
        let s = self.weights.iter().zip(values).fold(T::zero(), |acc, (&w, &v)| acc + w * v);
        Ok(s * self.length / T::lit(2.0))
    }

    /// Embeds interior values into a full nodal vector with zero boundary values.
    pub fn embed(&self, interior: &[T]) -> Vec<T> {
        assert_eq!(interior.len(), self.n - 1);
        let mut full = Vec::with_capacity(self.n + 1);
        full.push(T::zero());
        full.extend_from_slice(interior);
        full.push(T::zero());
        full
    }

    /// Samples `profile` at the interior radii `r_1..r_{N-1}`.
    pub fn resample(&self, profile: &RadialProfile<T>) -> Result<Vec<T>> {
        self.interior_r().iter().map(|&r| profile.eval(r)).collect()
    }

    /// Evaluates the degree-`N` interpolant of nodal `values` at radius `r`
    /// (barycentric form).
    pub fn interpolate(&self, values: &[T], r: T) -> T {
        assert_eq!(values.len(), self.n + 1);
        let x = T::lit(2.0) * r / self.length - T::one();
        let mut num = T::zero();
        let mut den = T::zero();
        for (k, (&xk, &fk)) in self.x.iter().zip(values).enumerate() {
            let dx = x - xk;
            if dx == T::zero() {
                return fk;
            }
            let mut w = if k % 2 == 0 { T::one() } else { -T::one() };
            if k == 0 || k == self.n {
                w /= T::lit(2.0);
            }
            num += w * fk / dx;
            den += w / dx;
        }
        num / den
    }
}
