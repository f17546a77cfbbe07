//! Fixed-step classical Runge–Kutta integration on a radial interval.
//!
//! Used both by the stationary shooting solver and by the eigenfunction
//! verifier. Integration can stop early when a divergence trigger fires; a
//! non-finite right-hand side is reported separately as
//! [`Error::NumericalBlowup`].

use crate::error::{Error, Result};
use crate::scalar::Real;

/// First-order system `y' = f(r, y)`.
pub trait OdeSystem<T: Real> {
    fn dimension(&self) -> usize;
    fn rhs(&self, r: T, y: &[T], dydr: &mut [T]);
}

/// Adapts a closure into an [`OdeSystem`].
pub struct FnSystem<F> {
    dim: usize,
    f: F,
}

impl<F> FnSystem<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<T: Real, F: Fn(T, &[T], &mut [T])> OdeSystem<T> for FnSystem<F> {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn rhs(&self, r: T, y: &[T], dydr: &mut [T]) {
        (self.f)(r, y, dydr)
    }
}

/// Stopping rule checked after every accepted step.
pub enum Trigger<'a, T> {
    Never,
    /// Fires when any component magnitude exceeds the threshold.
    Threshold(T),
    Custom(&'a dyn Fn(T, &[T]) -> bool),
}

impl<T: Real> Trigger<'_, T> {
    fn fires(&self, r: T, y: &[T]) -> bool {
        match self {
            Trigger::Never => false,
            Trigger::Threshold(limit) => y.iter().any(|v| v.abs() > *limit),
            Trigger::Custom(f) => f(r, y),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegrationResult<T> {
    pub grid: Vec<T>,
    /// Row-major samples, `dimension` values per grid point.
    samples: Vec<T>,
    dimension: usize,
    pub terminated_early: bool,
    pub termination_radius: Option<T>,
}

impl<T: Real> IntegrationResult<T> {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn sample(&self, i: usize) -> &[T] {
        &self.samples[i * self.dimension..(i + 1) * self.dimension]
    }

    pub fn last(&self) -> &[T] {
        self.sample(self.len() - 1)
    }

    /// Values of one component along the grid.
    pub fn component(&self, k: usize) -> Vec<T> {
        assert!(k < self.dimension);
        self.samples.iter().skip(k).step_by(self.dimension).copied().collect()
    }

    /// Drops every sample after index `i`.
    pub fn truncate(&mut self, i: usize) {
        self.grid.truncate(i + 1);
        self.samples.truncate((i + 1) * self.dimension);
    }
}

/// Integrates `sys` from `r_start` to `r_end` with fixed step `step` using
/// classical fourth-order Runge–Kutta. The final step is shortened so that
/// the last grid point lands exactly on `r_end`.
pub fn integrate<T: Real, S: OdeSystem<T> + ?Sized>(
    sys: &S,
    y0: &[T],
    r_start: T,
    r_end: T,
    step: T,
    trigger: &Trigger<'_, T>,
) -> Result<IntegrationResult<T>> {
    let dim = sys.dimension();
    if y0.len() != dim {
        return Err(Error::DimensionError { expected: dim, found: y0.len() });
    }
    if !(r_start < r_end) {
        return Err(Error::InvalidArgument(format!(
            "r_start {r_start} must be below r_end {r_end}"
        )));
    }
    if !(step > T::zero()) {
        return Err(Error::InvalidArgument(format!("step {step} must be positive")));
    }

    let span = (r_end - r_start) / step;
    let full = span.floor().to_usize().unwrap_or(0);
    let remainder = span - T::from_usize_lossy(full);
    let n_steps = if remainder > T::lit(1e-9) { full + 1 } else { full.max(1) };

    let mut grid = Vec::with_capacity(n_steps + 1);
    let mut samples = Vec::with_capacity((n_steps + 1) * dim);
    grid.push(r_start);
    samples.extend_from_slice(y0);

    let mut y = y0.to_vec();
    let mut k1 = vec![T::zero(); dim];
    let mut k2 = vec![T::zero(); dim];
    let mut k3 = vec![T::zero(); dim];
    let mut k4 = vec![T::zero(); dim];
    let mut tmp = vec![T::zero(); dim];
    let half = T::lit(0.5);
    let sixth = T::one() / T::lit(6.0);
    let two = T::lit(2.0);

    let mut r = r_start;
    for i in 1..=n_steps {
        let r_next = if i == n_steps { r_end } else { r_start + T::from_usize_lossy(i) * step };
        let h = r_next - r;

        sys.rhs(r, &y, &mut k1);
        for j in 0..dim {
            tmp[j] = y[j] + half * h * k1[j];
        }
        sys.rhs(r + half * h, &tmp, &mut k2);
        for j in 0..dim {
            tmp[j] = y[j] + half * h * k2[j];
        }
        sys.rhs(r + half * h, &tmp, &mut k3);
        for j in 0..dim {
            tmp[j] = y[j] + h * k3[j];
        }
        sys.rhs(r_next, &tmp, &mut k4);

        for j in 0..dim {
            let d = k1[j] + two * (k2[j] + k3[j]) + k4[j];
            if !d.is_finite() {
                return Err(Error::NumericalBlowup { radius: r.to_f64_lossy() });
            }
            y[j] += h * sixth * d;
        }
        r = r_next;
        grid.push(r);
        samples.extend_from_slice(&y);

        if trigger.fires(r, &y) {
            return Ok(IntegrationResult {
                grid,
                samples,
                dimension: dim,
                terminated_early: i < n_steps,
                termination_radius: if i < n_steps { Some(r) } else { None },
            });
        }
    }

    Ok(IntegrationResult {
        grid,
        samples,
        dimension: dim,
        terminated_early: false,
        termination_radius: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn growth() -> FnSystem<impl Fn(f64, &[f64], &mut [f64])> {
        FnSystem::new(1, |_r: f64, y: &[f64], d: &mut [f64]| d[0] = y[0])
    }

    #[test]
    fn exponential_endpoint() {
        let res = integrate(&growth(), &[1.0], 0.0, 1.0, 1e-3, &Trigger::Never).unwrap();
        assert_relative_eq!(*res.last().first().unwrap(), std::f64::consts::E, epsilon = 1e-9);
        assert_eq!(res.grid[0], 0.0);
        assert_eq!(res.grid.len(), res.len());
        assert_eq!(*res.grid.last().unwrap(), 1.0);
        assert!(!res.terminated_early);
    }

    #[test]
    fn constant_solution_is_exact() {
        let sys = FnSystem::new(2, |_r: f64, _y: &[f64], d: &mut [f64]| d.fill(0.0));
        let res = integrate(&sys, &[3.25, -1.5], 0.0, 2.0, 0.01, &Trigger::Never).unwrap();
        for i in 0..res.len() {
            assert_eq!(res.sample(i), &[3.25, -1.5]);
        }
    }

    #[test]
    fn fourth_order_convergence() {
        let err = |h: f64| {
            let res = integrate(&growth(), &[1.0], 0.0, 1.0, h, &Trigger::Never).unwrap();
            (res.last()[0] - std::f64::consts::E).abs()
        };
        for h in [0.1, 0.05, 0.025] {
            let ratio = err(h) / err(h / 2.0);
            assert!((14.0..=18.0).contains(&ratio), "h = {h}: ratio {ratio}");
        }
    }

    #[test]
    fn threshold_trigger_stops_early() {
        let res = integrate(&growth(), &[1.0], 0.0, 10.0, 1e-3, &Trigger::Threshold(100.0)).unwrap();
        assert!(res.terminated_early);
        let r = res.termination_radius.unwrap();
        assert!((r - 100f64.ln()).abs() < 2e-3);
        assert!(res.last()[0] > 100.0);
    }

    #[test]
    fn trigger_at_final_step_is_not_early() {
        let res = integrate(&growth(), &[1.0], 0.0, 1.0, 0.1, &Trigger::Threshold(2.7)).unwrap();
        assert!(!res.terminated_early);
        assert_eq!(res.termination_radius, None);
    }

    #[test]
    fn non_finite_rhs_is_blowup() {
        let sys = FnSystem::new(1, |r: f64, _y: &[f64], d: &mut [f64]| d[0] = 1.0 / (r - 0.5));
        let err = integrate(&sys, &[0.0], 0.0, 1.0, 0.25, &Trigger::Never).unwrap_err();
        assert!(matches!(err, Error::NumericalBlowup { .. }));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(integrate(&growth(), &[1.0, 2.0], 0.0, 1.0, 0.1, &Trigger::Never).is_err());
        assert!(integrate(&growth(), &[1.0], 1.0, 0.0, 0.1, &Trigger::Never).is_err());
        assert!(integrate(&growth(), &[1.0], 0.0, 1.0, 0.0, &Trigger::Never).is_err());
    }

    #[test]
    fn single_precision_runs() {
        let sys = FnSystem::new(1, |_r: f32, y: &[f32], d: &mut [f32]| d[0] = y[0]);
        let res = integrate(&sys, &[1.0f32], 0.0, 1.0, 1e-2, &Trigger::Never).unwrap();
        assert!((res.last()[0] - std::f32::consts::E).abs() < 1e-5);
    }

    #[test]
    fn deterministic() {
        let a = integrate(&growth(), &[0.3], 0.0, 2.0, 1e-3, &Trigger::Never).unwrap();
        let b = integrate(&growth(), &[0.3], 0.0, 2.0, 1e-3, &Trigger::Never).unwrap();
        assert_eq!(a, b);
    }

    proptest::proptest! {
        #[test]
        fn linear_systems_scale(alpha in -50.0f64..50.0, y0 in -2.0f64..2.0, y1 in -2.0f64..2.0) {
            let sys = FnSystem::new(2, |r: f64, y: &[f64], d: &mut [f64]| {
                d[0] = y[1];
                d[1] = -(1.0 + r) * y[0];
            });
            let base = integrate(&sys, &[y0, y1], 0.0, 3.0, 1e-2, &Trigger::Never).unwrap();
            let scaled = integrate(&sys, &[alpha * y0, alpha * y1], 0.0, 3.0, 1e-2, &Trigger::Never).unwrap();
            for (a, b) in base.last().iter().zip(scaled.last()) {
                let expect = alpha * a;
                proptest::prop_assert!((b - expect).abs() <= 1e-12 * expect.abs().max(1e-300) + 1e-14);
            }
        }
    }
}
