//! Closed-form checks on stationary states and modes: virial relations,
//! the second-moment identity, the Sobolev machinery behind the growth-rate
//! bound, and conversion of nondimensional time to seconds.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chebyshev::ChebyshevGrid;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::stability::{EigenMode, PerturbationOperator};
use crate::stationary::StationaryState;

/// Relative virial residuals `|T + EI/3|`, `|V − 4EI/3|`, `|𝓔 − EI/3|`, each over `|E| I`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VirialResiduals<T = f64> {
    pub kinetic: T,
    pub potential: T,
    pub energy: T,
}

impl<T: Real> VirialResiduals<T> {
    pub fn max(&self) -> T {
        self.kinetic.max(self.potential).max(self.energy)
    }
}

/// At unit norm these reduce to `T = −E/3`, `V = 4E/3`, `𝓔 = E/3`.
pub fn virial_check<T: Real>(state: &StationaryState<T>) -> VirialResiduals<T> {
    let ei = state.energy * state.norm;
    let scale = ei.abs();
    let three = T::lit(3.0);
    VirialResiduals {
        kinetic: (state.kinetic + ei / three).abs() / scale,
        potential: (state.potential - T::lit(4.0) * ei / three).abs() / scale,
        energy: (state.conserved_energy - ei / three).abs() / scale,
    }
}

/// Second time derivative of `∫ r²|ψ|²`, `8𝓔 − 2V`; vanishes on stationary states.
pub fn dispersion_acceleration<T: Real>(state: &StationaryState<T>) -> T {
    T::lit(8.0) * state.conserved_energy - T::lit(2.0) * state.potential
}

/// `(4/9π²) √(−E)`, the bound on `|Re λ|` for a state of unit norm.
pub fn growth_bound<T: Real>(energy: T) -> Result<T> {
    if !(energy < T::zero()) {
        return Err(Error::NotABoundState(energy.to_f64_lossy()));
    }
    Ok(T::lit(4.0 / (9.0 * PI * PI)) * (-energy).sqrt())
}

/// Bound on `|Re λ|` for a state of norm `norm` whose energy at that norm is `energy`.
pub fn growth_bound_at_norm<T: Real>(energy: T, norm: T) -> Result<T> {
    Ok(norm * growth_bound(energy)?)
}

/// Best constant `K` in `‖f‖₆ ≤ K ‖∇f‖₂` on R³.
pub fn sobolev_constant() -> f64 {
    2f64.powf(2.0 / 3.0) / (3f64.sqrt() * PI.powf(2.0 / 3.0))
}

/// Returns `(∫|R₀|³ d³x, I^{3/4} K^{3/2} T^{3/4})`.
pub fn r0_cubed_bound<T: Real>(state: &StationaryState<T>) -> (T, T) {
    let four_pi = T::lit(4.0 * PI);
    let direct = four_pi * state.r0.trapezoid(|r, v| v.abs().powi(3) * r * r);
    let k = T::lit(sobolev_constant());
    let p = T::lit(0.75);
    let bound = state.norm.powf(p) * k.powf(T::lit(1.5)) * state.kinetic.powf(p);
    (direct, bound)
}

/// Both sides of `‖∇w‖₂ ≤ 2K ‖R₀‖₃ ‖a‖₂` for `a = A/r`, `w = W/r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SobolevChain {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

pub fn sobolev_chain_check(mode: &EigenMode, op: &PerturbationOperator) -> SobolevChain {
    let grid = op.grid();
    let four_pi = 4.0 * PI;
    let w_full = embed_c(grid, &mode.w);
    let d_r = grid.d_r();
    let w_r: Vec<Complex64> = (0..w_full.len())
        .map(|i| d_r.row(i).iter().zip(&w_full).map(|(&d, &v)| v * d).sum())
        .collect();
    // ∫|∇w|² d³x = 4π ∫ |W_r|² dr once W vanishes at both ends
    let grad2 = four_pi * grid.quad(&w_r.iter().map(|v| v.norm_sqr()).collect::<Vec<_>>()).unwrap();
    let iw = grid.interior_weights();
    let a2 = four_pi * iw.iter().zip(&mode.a).map(|(w, v)| w * v.norm_sqr()).sum::<f64>();
    let r0_3 = four_pi
        * iw.iter()
            .zip(op.r0())
            .zip(grid.interior_r())
            .map(|((w, v), r)| w * v.abs().powi(3) * r * r)
            .sum::<f64>();
    let lhs = grad2.sqrt();
    let rhs = 2.0 * sobolev_constant() * r0_3.cbrt() * a2.sqrt();
    SobolevChain { lhs, rhs, slack: rhs - lhs }
}

fn embed_c(grid: &ChebyshevGrid, interior: &[Complex64]) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); grid.degree() + 1];
    v[1..grid.degree()].copy_from_slice(interior);
    v
}

/// Relative difference between the norm from Clenshaw–Curtis on `grid` and the
/// trapezoid value stored with the state.
pub fn quadrature_agreement(state: &StationaryState<f64>, grid: &ChebyshevGrid) -> Result<f64> {
    let (psi, _) = state.extended_profiles(grid.length())?;
    let vals: Vec<f64> = grid
        .r()
        .iter()
        .map(|&r| psi.eval(r).map(|v| 4.0 * PI * v * v * r * r))
        .collect::<Result<_>>()?;
    let cc = grid.quad(&vals)?;
    Ok((cc - state.norm).abs() / state.norm)
}

/// Physical constants fixing the nondimensionalization, in SI units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalScales {
    pub g: f64,
    pub m: f64,
    pub hbar: f64,
}

impl PhysicalScales {
    pub fn new(g: f64, m: f64, hbar: f64) -> Result<Self> {
        if [g, m, hbar].iter().all(|v| *v > 0.0 && v.is_finite()) {
            Ok(Self { g, m, hbar })
        } else {
            Err(Error::InvalidScales)
        }
    }

    /// `γ = 32π² G² m⁵ / ħ³`, nondimensional time per second.
    pub fn gamma(&self) -> f64 {
        32.0 * PI * PI * self.g * self.g * self.m.powi(5) / self.hbar.powi(3)
    }
}

pub fn time_to_si(scales: &PhysicalScales, t_nondim: f64) -> Result<f64> {
    let s = PhysicalScales::new(scales.g, scales.m, scales.hbar)?;
    Ok(t_nondim / s.gamma())
}
