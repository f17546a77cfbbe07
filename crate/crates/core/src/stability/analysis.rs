use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::classify::{classify, dichotomy_q, quadruple_count, Tolerances};
use super::operator::{assemble_with, AssembleOptions, NodeSampling, PerturbationOperator, SPECTRUM_NORM};
use super::rayleigh::rayleigh_residual;
use super::solve::{solve_full, solve_reduced};
use super::{EigenMode, ModeClass};
use crate::chebyshev::ChebyshevGrid;
use crate::diagnostics::{growth_bound, growth_bound_at_norm};
use crate::error::Result;
use crate::stationary::StationaryState;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    Full,
    #[default]
    Reduced,
    /// Reduced problem for the report, full pencil as a cross-check.
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilityOptions {
    pub n_nodes: usize,
    /// Domain length; `None` uses [`default_length`].
    pub length: Option<f64>,
    pub solver: SolverChoice,
    pub sampling: NodeSampling,
    pub norm: f64,
    pub tol: Tolerances,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        Self {
            n_nodes: 60,
            length: None,
            solver: SolverChoice::Reduced,
            sampling: NodeSampling::Collocation,
            norm: SPECTRUM_NORM,
            tol: Tolerances::default(),
        }
    }
}

/// Energy of the two-node state in the tabulated convention.
const E2_TABULATED: f64 = -0.012526;

/// Domain length at the spectrum norm: 150 for the two lowest states, 450 for
/// the next, growing like `1/|E|` above that.
pub fn default_length(state: &StationaryState) -> f64 {
    match state.n {
        0 | 1 => 150.0,
        2 => 450.0,
        _ => (450.0 * E2_TABULATED / state.tabulated_energy()).round(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeSummary {
    /// `None` for infinite eigenvalues of the full pencil.
    pub re: Option<f64>,
    pub im: Option<f64>,
    pub class: ModeClass,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DichotomyEntry {
    pub re: f64,
    pub im: f64,
    #[serde(rename = "Q")]
    pub q: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub n: usize,
    #[serde(rename = "N")]
    pub n_nodes: usize,
    #[serde(rename = "L")]
    pub length: f64,
    pub norm: f64,
    /// Background energy at `norm`.
    pub energy: f64,
    pub sampling: NodeSampling,
    pub solver: SolverChoice,
    pub modes: Vec<ModeSummary>,
    pub quadruple_count: usize,
    pub zero_modes: usize,
    pub spurious: usize,
    pub dichotomy: Vec<DichotomyEntry>,
    pub rayleigh_residuals: Vec<f64>,
    /// Largest `|Re λ|` among quadruples; 0 when there are none.
    pub max_re: f64,
    /// Largest `|Re λ|` among all nontrivial modes, pairs included.
    pub max_re_any: f64,
    /// Growth-rate bound in the units of this spectrum.
    pub bound: f64,
    /// `(4/9π²)√(−E)` evaluated at the tabulated energy.
    pub bound_tabulated: f64,
    /// Largest relative disagreement between the two solvers, when both ran.
    pub cross_check: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct Analysis {
    pub operator: PerturbationOperator,
    pub modes: Vec<EigenMode>,
    /// Classified modes of the full pencil when it was solved alongside the reduced problem.
    pub full_modes: Option<Vec<EigenMode>>,
    pub report: StabilityReport,
}

fn classified(op: &PerturbationOperator, modes: Vec<EigenMode>, tol: &Tolerances) -> Vec<EigenMode> {
    classify(modes, &op.zero_mode_direction(), &op.grid().interior_weights(), tol)
}

/// Largest relative distance from each of the `k` smallest nontrivial
/// eigenvalues of `a` to the nearest nontrivial eigenvalue of `b`.
pub fn cross_check(a: &[EigenMode], b: &[EigenMode], k: usize) -> f64 {
    let mut la: Vec<Complex64> = a.iter().filter(|m| m.is_physical()).map(|m| m.lambda).collect();
    let lb: Vec<Complex64> = b.iter().filter(|m| m.is_physical()).map(|m| m.lambda).collect();
    la.sort_by(|x, y| x.norm().total_cmp(&y.norm()));
    la.iter()
        .take(k)
        .map(|x| lb.iter().map(|y| (x - y).norm()).fold(f64::INFINITY, f64::min) / x.norm())
        .fold(0.0, f64::max)
}

pub fn analyze(state: &StationaryState, opts: &StabilityOptions) -> Result<Analysis> {
    let length = opts.length.unwrap_or_else(|| default_length(state));
    let grid = ChebyshevGrid::new(opts.n_nodes, length)?;
    let op = assemble_with(state, &grid, &AssembleOptions { sampling: opts.sampling, norm: opts.norm })?;
    let (modes, full_modes) = match opts.solver {
        SolverChoice::Reduced => (classified(&op, solve_reduced(&op)?, &opts.tol), None),
        SolverChoice::Full => (classified(&op, solve_full(&op)?, &opts.tol), None),
        SolverChoice::Both => {
            let reduced = classified(&op, solve_reduced(&op)?, &opts.tol);
            let full = classified(&op, solve_full(&op)?, &opts.tol);
            (reduced, Some(full))
        }
    };
    let cross = full_modes.as_ref().map(|f| cross_check(&modes, f, 10));

    let mut physical: Vec<&EigenMode> = modes.iter().filter(|m| m.is_physical()).collect();
    physical.sort_by(|x, y| x.lambda.norm().total_cmp(&y.lambda.norm()).then(x.lambda.im.total_cmp(&y.lambda.im)));
    let dichotomy = physical
        .iter()
        .filter_map(|m| {
            dichotomy_q(m, &grid).ok().map(|q| DichotomyEntry { re: m.lambda.re, im: m.lambda.im, q })
        })
        .collect();
    let rayleigh_residuals = physical.iter().map(|m| rayleigh_residual(m, &op).max()).collect();
    let max_re = modes
        .iter()
        .filter(|m| m.class == ModeClass::ComplexQuadruple)
        .fold(0.0, |acc: f64, m| acc.max(m.lambda.re.abs()));
    let max_re_any = physical.iter().fold(0.0, |acc: f64, m| acc.max(m.lambda.re.abs()));
    let finite = |v: f64| if v.is_finite() { Some(v) } else { None };
    let report = StabilityReport {
        n: state.n,
        n_nodes: opts.n_nodes,
        length,
        norm: op.norm(),
        energy: op.energy(),
        sampling: opts.sampling,
        solver: opts.solver,
        modes: modes
            .iter()
            .map(|m| ModeSummary { re: finite(m.lambda.re), im: finite(m.lambda.im), class: m.class })
            .collect(),
        quadruple_count: quadruple_count(&modes),
        zero_modes: modes.iter().filter(|m| m.class == ModeClass::ZeroMode).count(),
        spurious: modes.iter().filter(|m| m.class == ModeClass::Spurious).count(),
        dichotomy,
        rayleigh_residuals,
        max_re,
        max_re_any,
        bound: growth_bound_at_norm(op.energy(), op.norm())?,
        bound_tabulated: growth_bound(state.tabulated_energy())?,
        cross_check: cross,
    };
    Ok(Analysis { operator: op, modes, full_modes, report })
}
