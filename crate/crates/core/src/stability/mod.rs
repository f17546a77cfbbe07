//! Linear stability of stationary states.
//!
//! Radial perturbations `ψ = (R₀ + (R + iI)/r) e^{−iEt}`, `φ = φ₀ + Φ/r` with
//! `(R, I, Φ) ∝ (A, B, W) e^{λt}` lead, after collocation on the interior
//! Chebyshev nodes of `(0, L)`, to the pencil
//!
//! ```text
//! [ −2R₀   0      D2 ] [A]        [ 0  0  0 ] [A]
//! [  0     H      0  ] [B] = iλ · [−I  0  0 ] [B]     H = D2 + U₀
//! [ −H     0      R₀ ] [W]        [ 0  I  0 ] [W]
//! ```
//!
//! and, after eliminating `W = D2⁻¹(2R₀A)`, to the standard problem
//! `[[0, H], [H − 2R₀D2⁻¹R₀, 0]] (A, B) = −iλ (A, B)`.

mod analysis;
mod classify;
mod operator;
mod rayleigh;
mod solve;
mod sweep;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use analysis::{
    analyze, default_length, cross_check, Analysis, DichotomyEntry, ModeSummary, SolverChoice,
    StabilityOptions, StabilityReport,
};
pub use classify::{classify, cosine as cosine_similarity, dichotomy_q, quadruple_count, Tolerances};
pub use operator::{assemble, assemble_with, AssembleOptions, NodeSampling, PerturbationOperator, SPECTRUM_NORM};
pub use rayleigh::{rayleigh_residual, RayleighCheck};
pub use solve::{solve_full, solve_reduced};
pub use sweep::{convergence_sweep, track, ModeSelector, SweepParameter};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModeClass {
    /// Not yet passed through [`classify`].
    Unclassified,
    ZeroMode,
    ImaginaryPair,
    ComplexQuadruple,
    Spurious,
}

impl ModeClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ModeClass::Unclassified => "Unclassified",
            ModeClass::ZeroMode => "ZeroMode",
            ModeClass::ImaginaryPair => "ImaginaryPair",
            ModeClass::ComplexQuadruple => "ComplexQuadruple",
            ModeClass::Spurious => "Spurious",
        }
    }
}

/// Eigenvalue `λ` with its eigenfunction on the interior nodes, scaled so that
/// `∫(|A|² + |B|²) dr = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenMode {
    pub lambda: Complex64,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
    pub w: Vec<Complex64>,
    pub class: ModeClass,
    /// Pair or quadruple this mode was matched into.
    pub group: Option<usize>,
}

impl EigenMode {
    pub fn is_finite(&self) -> bool {
        self.lambda.re.is_finite() && self.lambda.im.is_finite()
    }

    /// Nontrivial: neither the zero mode nor spurious.
    pub fn is_physical(&self) -> bool {
        matches!(self.class, ModeClass::ImaginaryPair | ModeClass::ComplexQuadruple)
    }
}
