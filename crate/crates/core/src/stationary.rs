//! Spherically-symmetric stationary states by shooting on the central value.
//!
//! With `S = rψ` and `V = rU` (`U = E − φ`) the radial equations read
//! `S'' = −S V / r`, `V'' = −S² / r`. Trials start at `r_min` from
//! `S ≈ ψ(0) r`, `V ≈ U(0) r` and run outward until `|S|/r` exceeds a
//! multiple of `ψ(0)`. Bisection on `ψ(0)` separates trials with more than
//! `n` sign changes from those with at most `n`; the converged trajectory is
//! cut at its last minimum of `|S|` (the trust radius) and normalized with
//! the scaling symmetry `(ψ, U, r) → (λ²ψ, λ²U, r/λ)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::RadialProfile;
use crate::radial_ode::{integrate, FnSystem, IntegrationResult, Trigger};
use crate::scalar::Real;

/// 3D norm `∫|ψ|² d³x` at which `∫₀^∞ ψ² r² dr = 1`.
pub const UNIT_RADIAL_NORM: f64 = 4.0 * PI;

#[derive(Clone, Debug)]
pub struct ShootOptions<T = f64> {
    /// Central value `U(0)` used for the unnormalized trials.
    pub u_center: T,
    /// Outer radius of the trials in unnormalized units; `None` picks one from `n`.
    pub r_max: Option<T>,
    /// RK4 steps across `[r_min, r_max]`.
    pub steps: usize,
    pub r_min: T,
    pub bracket_tol: T,
    /// Upper end of the `ψ(0)` scan, in units of `U(0)`.
    pub scan_max: T,
    /// Downward scan step for `ψ(0)`, in units of `U(0)`.
    pub scan_step: T,
    /// Trials stop once `|S|/r > divergence_factor · ψ(0)`.
    pub divergence_factor: T,
    /// Target 3D norm `I = 4π ∫ ψ² r² dr`.
    pub norm: T,
    /// Samples in the stored profiles.
    pub profile_points: usize,
    /// Outer fraction of the trusted range used for the `U ≈ E + c/r` fit.
    pub fit_fraction: T,
    pub max_fit_residual: T,
    /// Times `r_max` may be enlarged when a trial never diverges.
    pub max_growth: usize,
}

impl<T: Real> Default for ShootOptions<T> {
    fn default() -> Self {
        Self {
            u_center: T::one(),
            r_max: None,
            steps: 100_000,
            r_min: T::lit(1e-6),
            bracket_tol: T::lit(1e-12),
            scan_max: T::lit(2.0),
            scan_step: T::lit(0.02),
            divergence_factor: T::lit(1e4),
            norm: T::one(),
            profile_points: 100_001,
            fit_fraction: T::lit(0.2),
            max_fit_residual: T::lit(1e-4),
            max_growth: 4,
        }
    }
}

/// Least-squares fit `U(r) ≈ E + c/r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFit<T = f64> {
    pub energy: T,
    pub coefficient: T,
    /// Largest absolute deviation over the fitted window.
    pub residual: T,
}

/// Normalized bound state with `n` interior zeros.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationaryState<T = f64> {
    pub n: usize,
    pub energy: T,
    /// ψ as a function of radius.
    pub r0: RadialProfile<T>,
    /// U = E − φ as a function of radius.
    pub u0: RadialProfile<T>,
    /// 3D norm `4π ∫ ψ² r² dr`.
    pub norm: T,
    pub kinetic: T,
    pub potential: T,
    pub conserved_energy: T,
    /// Radius beyond which the shooting trajectory is not trusted; profiles end here.
    pub trust_radius: T,
    /// Coefficient `c` of the far field `U ≈ E + c/r`.
    pub tail_coefficient: T,
    pub fit_residual: T,
    /// Central value ψ(0) of the converged unnormalized trial.
    pub shooting_psi0: T,
    pub shooting_u0: T,
}

impl<T: Real> StationaryState<T> {
    /// ψ(r), continued beyond the trust radius by its exponential tail.
    pub fn psi(&self, r: T) -> T {
        if r <= self.trust_radius {
            return self.r0.eval(r.max(T::zero())).expect("radius inside profile support");
        }
        let rt = self.trust_radius;
        let k = (-self.energy).max(T::zero()).sqrt();
        let at_edge = self.r0.values()[self.r0.len() - 1];
        at_edge * rt / r * (-(k * (r - rt))).exp()
    }

    /// U(r), continued beyond the trust radius by `E + c/r`.
    pub fn u(&self, r: T) -> T {
        if r <= self.trust_radius {
            return self.u0.eval(r.max(T::zero())).expect("radius inside profile support");
        }
        self.energy + self.tail_coefficient / r
    }

    /// Profiles of ψ and U covering `[0, max(r_end, trust_radius)]`.
    pub fn extended_profiles(&self, r_end: T) -> Result<(RadialProfile<T>, RadialProfile<T>)> {
        if r_end <= self.trust_radius {
            return Ok((self.r0.clone(), self.u0.clone()));
        }
        let g = self.r0.grid();
        let h = g[g.len() - 1] - g[g.len() - 2];
        let extra = ((r_end - self.trust_radius) / h).ceil().to_usize().unwrap_or(1).max(1);
        let step = (r_end - self.trust_radius) / T::from_usize_lossy(extra);
        let mut grid = g.to_vec();
        let mut psi = self.r0.values().to_vec();
        let mut u = self.u0.values().to_vec();
        for i in 1..=extra {
            let r = if i == extra { r_end } else { self.trust_radius + T::from_usize_lossy(i) * step };
            grid.push(r);
            psi.push(self.psi(r));
            u.push(self.u(r));
        }
        Ok((RadialProfile::new(grid.clone(), psi)?, RadialProfile::new(grid, u)?))
    }

    /// Applies the scaling symmetry with factor `lambda`.
    pub fn rescaled(&self, lambda: T) -> Result<Self> {
        let (r0, u0) = rescale(&self.r0, &self.u0, lambda)?;
        let l = lambda.abs();
        let l2 = l * l;
        let l3 = l2 * l;
        Ok(Self {
            n: self.n,
            energy: l2 * self.energy,
            r0,
            u0,
            norm: l * self.norm,
            kinetic: l3 * self.kinetic,
            potential: l3 * self.potential,
            conserved_energy: l3 * self.conserved_energy,
            trust_radius: self.trust_radius / l,
            tail_coefficient: l * self.tail_coefficient,
            fit_residual: l2 * self.fit_residual,
            shooting_psi0: self.shooting_psi0,
            shooting_u0: self.shooting_u0,
        })
    }

    pub fn normalized_to(&self, norm: T) -> Result<Self> {
        self.rescaled(norm / self.norm)
    }

    /// Energy eigenvalue the same state would have at 3D norm `norm`.
    pub fn energy_at_norm(&self, norm: T) -> T {
        let s = norm / self.norm;
        self.energy * s * s
    }

    /// Energy in the half-Laplacian convention (`−½∇²ψ + φψ = Eψ`) at
    /// `∫₀^∞ ψ² r² dr = 1`, the unit in which the level table is usually quoted.
    pub fn tabulated_energy(&self) -> T {
        T::lit(2.0) * self.energy_at_norm(T::lit(UNIT_RADIAL_NORM))
    }

    /// Node count inside the trusted range.
    pub fn nodes(&self) -> usize {
        count_nodes(&self.r0, self.trust_radius)
    }
}

/// Scaling symmetry `(ψ, U, r) → (λ²ψ(λ·), λ²U(λ·))` on a sampled pair.
pub fn rescale<T: Real>(
    psi: &RadialProfile<T>,
    u: &RadialProfile<T>,
    lambda: T,
) -> Result<(RadialProfile<T>, RadialProfile<T>)> {
    if lambda == T::zero() || !lambda.is_finite() {
        return Err(Error::DegenerateScaling);
    }
    let l = lambda.abs();
    let l2 = l * l;
    let map = |p: &RadialProfile<T>| {
        let grid = p.grid().iter().map(|&r| r / l).collect();
        let values = p.values().iter().map(|&v| l2 * v).collect();
        RadialProfile::new(grid, values)
    };
    Ok((map(psi)?, map(u)?))
}

/// Fits `U ≈ E + c/r` over the outer `fraction` of the profile's range.
pub fn extract_energy<T: Real>(
    u: &RadialProfile<T>,
    fraction: T,
    max_residual: T,
) -> Result<AsymptoticFit<T>> {
    let r_hi = u.r_max();
    let r_cut = r_hi - fraction * (r_hi - u.r_min());
    let (mut s0, mut s1, mut s2, mut t0, mut t1) = (T::zero(), T::zero(), T::zero(), T::zero(), T::zero());
    let mut window = Vec::new();
    for (&r, &v) in u.grid().iter().zip(u.values()) {
        if r < r_cut || r <= T::zero() {
            continue;
        }
        let q = T::one() / r;
        s0 += T::one();
        s1 += q;
        s2 += q * q;
        t0 += v;
        t1 += v * q;
        window.push((q, v));
    }
    if window.len() < 2 {
        return Err(Error::InsufficientData(window.len()));
    }
    let det = s0 * s2 - s1 * s1;
    let (energy, coefficient) = if det.abs() <= T::epsilon() * s0 * s2 {
        (t0 / s0, T::zero())
    } else {
        ((t0 * s2 - t1 * s1) / det, (s0 * t1 - s1 * t0) / det)
    };
    let residual = window
        .iter()
        .fold(T::zero(), |m, &(q, v)| m.max((energy + coefficient * q - v).abs()));
    if !(residual <= max_residual) {
        return Err(Error::AsymptoteNotReached { residual: residual.to_f64_lossy() });
    }
    Ok(AsymptoticFit { energy, coefficient, residual })
}

/// Sign changes of ψ strictly inside `(0, r_trust)`.
pub fn count_nodes<T: Real>(psi: &RadialProfile<T>, r_trust: T) -> usize {
    psi.sign_changes_below(r_trust)
}

struct Trial<T> {
    path: IntegrationResult<T>,
    sign_changes: usize,
}

fn trial<T: Real>(psi0: T, r_max: T, opts: &ShootOptions<T>) -> Result<Trial<T>> {
    let sys = FnSystem::new(4, |r: T, y: &[T], d: &mut [T]| {
        d[0] = y[1];
        d[1] = -y[0] * y[2] / r;
        d[2] = y[3];
        d[3] = -y[0] * y[0] / r;
    });
    let rm = opts.r_min;
    let y0 = [psi0 * rm, psi0, opts.u_center * rm, opts.u_center];
    let limit = opts.divergence_factor * psi0.abs();
    let stop = move |r: T, y: &[T]| y[0].abs() / r > limit;
    let step = (r_max - rm) / T::from_usize_lossy(opts.steps);
    let path = integrate(&sys, &y0, rm, r_max, step, &Trigger::Custom(&stop))?;
    let mut sign_changes = 0;
    let mut last = T::zero();
    for i in 0..path.len() {
        let s = path.sample(i)[0];
        if s != T::zero() {
            if last != T::zero() && (s > T::zero()) != (last > T::zero()) {
                sign_changes += 1;
            }
            last = s;
        }
    }
    Ok(Trial { path, sign_changes })
}

/// Index of the last local minimum of `|S|`.
fn trust_index<T: Real>(path: &IntegrationResult<T>) -> usize {
    let s: Vec<T> = path.component(0).into_iter().map(|v| v.abs()).collect();
    (1..s.len() - 1)
        .rev()
        .find(|&i| s[i] <= s[i - 1] && s[i] <= s[i + 1])
        .unwrap_or(s.len() - 1)
}

fn default_r_max<T: Real>(n: usize, u_center: T) -> T {
    T::lit(60.0 + 15.0 * n as f64) / u_center.sqrt()
}

/// Finds and normalizes the stationary state with `n` nodes.
pub fn shoot<T: Real>(n: usize, opts: &ShootOptions<T>) -> Result<StationaryState<T>> {
    if !(opts.u_center > T::zero()) || !(opts.norm > T::zero()) || !(opts.bracket_tol > T::zero()) {
        return Err(Error::InvalidArgument("u_center, norm and bracket_tol must be positive".into()));
    }
    let mut r_max = opts.r_max.unwrap_or_else(|| default_r_max(n, opts.u_center));
    let mut last_err = None;
    for _ in 0..=opts.max_growth {
        match shoot_once(n, r_max, opts) {
            Ok(state) => return Ok(state),
            Err(
                e @ (Error::BracketFailure { .. }
                | Error::StateNotIsolated { .. }
                | Error::AsymptoteNotReached { .. }),
            ) => last_err = Some(e),
            Err(e) => return Err(e),
        }
        r_max *= T::lit(1.5);
    }
    Err(last_err.unwrap_or(Error::BracketFailure { n, lo: 0.0, hi: 0.0 }))
}

fn shoot_once<T: Real>(n: usize, r_max: T, opts: &ShootOptions<T>) -> Result<StationaryState<T>> {
    let scale = opts.u_center;
    let mut hi = opts.scan_max * scale;
    let top = trial(hi, r_max, opts)?;
    if top.sign_changes > n {
        return Err(Error::BracketFailure { n, lo: 0.0, hi: hi.to_f64_lossy() });
    }
    let step = opts.scan_step * scale;
    let mut lo = hi - step;
    loop {
        if !(lo > T::zero()) {
            return Err(Error::BracketFailure {
                n,
                lo: 0.0,
                hi: (opts.scan_max * scale).to_f64_lossy(),
            });
        }
        if trial(lo, r_max, opts)?.sign_changes > n {
            break;
        }
        hi = lo;
        lo -= step;
    }
    while hi - lo > opts.bracket_tol * scale {
        let mid = (lo + hi) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if trial(mid, r_max, opts)?.sign_changes > n {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mut best = trial(hi, r_max, opts)?;
    if !best.path.terminated_early {
        return Err(Error::AsymptoteNotReached { residual: f64::NAN });
    }
    let cut = trust_index(&best.path);
    best.path.truncate(cut);
    let path = best.path;
    let r_trust = path.grid[path.len() - 1];

    // ψ and U on the trial grid, with the origin restored
    let mut grid = path.grid.clone();
    grid[0] = T::zero();
    let mut psi = Vec::with_capacity(path.len());
    let mut u = Vec::with_capacity(path.len());
    for i in 0..path.len() {
        let y = path.sample(i);
        if i == 0 {
            psi.push(hi);
            u.push(opts.u_center);
        } else {
            psi.push(y[0] / path.grid[i]);
            u.push(y[2] / path.grid[i]);
        }
    }
    let psi_raw = RadialProfile::new(grid.clone(), psi)?;
    let u_raw = RadialProfile::new(grid, u)?;

    let nodes = count_nodes(&psi_raw, r_trust);
    if nodes != n {
        return Err(Error::StateNotIsolated { n, found: nodes });
    }
    let fit = extract_energy(&u_raw, opts.fit_fraction, opts.max_fit_residual)?;

    // quadratures on the RK grid: S = rψ, ψ' r = S' − S/r
    let four_pi = T::lit(4.0 * PI);
    let half = T::lit(0.5);
    let (mut norm, mut kinetic, mut potential) = (T::zero(), T::zero(), T::zero());
    let integrand = |i: usize| {
        let r = path.grid[i];
        let y = path.sample(i);
        let s2 = y[0] * y[0];
        let grad = y[1] - y[0] / r;
        let phi = fit.energy - y[2] / r;
        (s2, grad * grad, phi * s2)
    };
    let mut prev = integrand(0);
    for i in 1..path.len() {
        let cur = integrand(i);
        let h = path.grid[i] - path.grid[i - 1];
        norm += half * h * (prev.0 + cur.0);
        kinetic += half * h * (prev.1 + cur.1);
        potential += half * h * (prev.2 + cur.2);
        prev = cur;
    }
    norm *= four_pi;
    kinetic *= four_pi;
    potential *= four_pi;

    let raw_profiles = resample_uniform(&psi_raw, &u_raw, opts.profile_points)?;
    let raw = StationaryState {
        n,
        energy: fit.energy,
        r0: raw_profiles.0,
        u0: raw_profiles.1,
        norm,
        kinetic,
        potential,
        conserved_energy: kinetic + half * potential,
        trust_radius: r_trust,
        tail_coefficient: fit.coefficient,
        fit_residual: fit.residual,
        shooting_psi0: hi,
        shooting_u0: opts.u_center,
    };
    raw.normalized_to(opts.norm)
}

fn resample_uniform<T: Real>(
    psi: &RadialProfile<T>,
    u: &RadialProfile<T>,
    points: usize,
) -> Result<(RadialProfile<T>, RadialProfile<T>)> {
    let grid = crate::profile::uniform(T::zero(), psi.r_max(), points.max(4));
    let p = grid.iter().map(|&r| psi.eval(r)).collect::<Result<Vec<_>>>()?;
    let v = grid.iter().map(|&r| u.eval(r)).collect::<Result<Vec<_>>>()?;
    Ok((RadialProfile::new(grid.clone(), p)?, RadialProfile::new(grid, v)?))
}

/// Energies of states `0..=n_max`.
pub fn spectrum_table<T: Real>(n_max: usize, opts: &ShootOptions<T>) -> Result<Vec<(usize, T)>> {
    if n_max > 50 {
        return Err(Error::InvalidArgument(format!("n_max {n_max} exceeds 50")));
    }
    (0..=n_max)
        .map(|n| {
            shoot(n, opts)
                .map(|s| (n, s.energy))
                .map_err(|e| Error::AtState { n, source: Box::new(e) })
        })
        .collect()
}

/// Least-squares slope of `ln|E_n|` against `ln n` for `n_lo <= n <= n_hi`.
pub fn loglog_slope<T: Real>(table: &[(usize, T)], n_lo: usize, n_hi: usize) -> Result<T> {
    if n_lo == 0 {
        return Err(Error::InvalidArgument("n_lo must be at least 1".into()));
    }
    let pts: Vec<(T, T)> = table
        .iter()
        .filter(|(n, _)| *n >= n_lo && *n <= n_hi)
        .map(|&(n, e)| (T::from_usize_lossy(n).ln(), e.abs().ln()))
        .collect();
    if pts.len() < 5 {
        return Err(Error::InsufficientData(pts.len()));
    }
    let m = T::from_usize_lossy(pts.len());
    let mx = pts.iter().fold(T::zero(), |a, p| a + p.0) / m;
    let my = pts.iter().fold(T::zero(), |a, p| a + p.1) / m;
    let sxy = pts.iter().fold(T::zero(), |a, p| a + (p.0 - mx) * (p.1 - my));
    let sxx = pts.iter().fold(T::zero(), |a, p| a + (p.0 - mx) * (p.0 - mx));
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fit_exact_model() {
        let u = RadialProfile::from_fn(1.0, 50.0, 2001, |r: f64| -0.5 + 1.0 / r).unwrap();
        let fit = extract_energy(&u, 0.2, 1e-4).unwrap();
        assert_abs_diff_eq!(fit.energy, -0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(fit.coefficient, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn fit_constant() {
        let u = RadialProfile::from_fn(0.0, 10.0, 101, |_| -0.25).unwrap();
        let fit = extract_energy(&u, 0.2, 1e-4).unwrap();
        assert_abs_diff_eq!(fit.energy, -0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.coefficient, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn fit_rejects_non_asymptotic_data() {
        let u = RadialProfile::from_fn(1.0, 10.0, 101, |r: f64| (r * 3.0).sin()).unwrap();
        assert!(matches!(extract_energy(&u, 0.2, 1e-4), Err(Error::AsymptoteNotReached { .. })));
    }

    #[test]
    fn nodes_of_constructed_profile() {
        let p = RadialProfile::from_fn(0.0, 10.0, 1001, |r: f64| (r * 0.9).cos()).unwrap();
        assert_eq!(count_nodes(&p, 10.0), 3);
        assert_eq!(count_nodes(&p, 4.0), 1);
    }

    #[test]
    fn rescale_identity_and_zero() {
        let p = RadialProfile::from_fn(0.0, 1.0, 5, |r: f64| 1.0 - r).unwrap();
        let (a, b) = rescale(&p, &p, 1.0).unwrap();
        assert_eq!(a, p);
        assert_eq!(b, p);
        assert_eq!(rescale(&p, &p, 0.0).unwrap_err(), Error::DegenerateScaling);
    }

    #[test]
    fn slope_of_power_laws() {
        let table: Vec<(usize, f64)> = (1..=20).map(|n| (n, -1.0 / (n * n) as f64)).collect();
        assert_abs_diff_eq!(loglog_slope(&table, 1, 20).unwrap(), -2.0, epsilon = 1e-12);
        let flat: Vec<(usize, f64)> = (1..=8).map(|n| (n, -0.3)).collect();
        assert_abs_diff_eq!(loglog_slope(&flat, 1, 8).unwrap(), 0.0, epsilon = 1e-12);
        assert_eq!(loglog_slope(&flat, 1, 4).unwrap_err(), Error::InsufficientData(4));
    }

    #[test]
    fn trial_far_from_bound_value_diverges() {
        let opts = ShootOptions::<f64>::default();
        let t = trial(1.6, 60.0, &opts).unwrap();
        assert!(t.path.terminated_early);
        let t = trial(0.9, 60.0, &opts).unwrap();
        assert!(t.path.terminated_early);
    }
}
