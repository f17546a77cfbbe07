use std::f64::consts::PI;

use faer::linalg::solvers::{DenseSolveCore, Solve};
use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::chebyshev::ChebyshevGrid;
use crate::dense::Matrix;
use crate::error::{Error, Result};
use crate::stationary::StationaryState;

/// Norm at which spectra are computed: `∫₀^∞ ψ² r² dr = 1`.
pub const SPECTRUM_NORM: f64 = 4.0 * PI;

/// How `R₀`, `U₀` are obtained at the collocation nodes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeSampling {
    /// Newton re-solve of the stationary equations on the nodes, seeded by the shooting profile.
    #[default]
    Collocation,
    /// Cubic interpolation of the shooting profile.
    Interpolated,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AssembleOptions {
    pub sampling: NodeSampling,
    pub norm: f64,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        Self { sampling: NodeSampling::Collocation, norm: SPECTRUM_NORM }
    }
}

#[derive(Clone, Debug)]
pub struct PerturbationOperator {
    grid: ChebyshevGrid,
    state_index: usize,
    norm: f64,
    energy: f64,
    sampling: NodeSampling,
    r0: Vec<f64>,
    u0: Vec<f64>,
    r0_full: Vec<f64>,
    u0_full: Vec<f64>,
    d2t: Mat<f64>,
    d2_inv: Mat<f64>,
    d2_condition: f64,
    lhs: Mat<f64>,
    rhs: Mat<f64>,
    reduced: Mat<f64>,
}

pub(crate) fn to_faer(m: &Matrix<f64>) -> Mat<f64> {
    Mat::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

fn condition(m: &Mat<f64>) -> f64 {
    match m.singular_values() {
        Ok(s) if !s.is_empty() => {
            let hi = s.iter().cloned().fold(0.0, f64::max);
            let lo = s.iter().cloned().fold(f64::INFINITY, f64::min);
            if lo > 0.0 { hi / lo } else { f64::INFINITY }
        }
        _ => f64::INFINITY,
    }
}

pub fn assemble(state: &StationaryState, grid: &ChebyshevGrid) -> Result<PerturbationOperator> {
    assemble_with(state, grid, &AssembleOptions::default())
}

pub fn assemble_with(
    state: &StationaryState,
    grid: &ChebyshevGrid,
    opts: &AssembleOptions,
) -> Result<PerturbationOperator> {
    let scaled = state.normalized_to(opts.norm)?;
    let (psi, u) = scaled.extended_profiles(grid.length())?;
    let r0_guess = grid.r().iter().map(|&r| psi.eval(r)).collect::<Result<Vec<_>>>()?;
    let u0_guess = grid.r().iter().map(|&r| u.eval(r)).collect::<Result<Vec<_>>>()?;
    let mut op = match opts.sampling {
        NodeSampling::Interpolated => {
            PerturbationOperator::from_nodes(grid, r0_guess, u0_guess, scaled.energy, opts.norm)?
        }
        NodeSampling::Collocation => {
            let (r0, u0, energy) = collocate(grid, &r0_guess, scaled.energy, opts.norm)?;
            PerturbationOperator::from_nodes(grid, r0, u0, energy, opts.norm)?
        }
    };
    op.state_index = state.n;
    op.sampling = opts.sampling;
    Ok(op)
}

/// Newton iteration for `S = rR₀` and `E` on the interior nodes:
/// `S'' + (E − P/r) S = 0`, `P'' = S²/r`, `P(0) = 0`, `P(L) = −I/4π`, `∫S² dr = I/4π`.
fn collocate(grid: &ChebyshevGrid, r0_full: &[f64], energy: f64, norm: f64) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let n = grid.degree();
    let m = grid.interior_len();
    let r = grid.interior_r().to_vec();
    let l = grid.length();
    let c = norm / (4.0 * PI);
    let w = grid.interior_weights();
    let d2t = to_faer(grid.d2_trimmed());
    let d2_inv = d2t.partial_piv_lu().inverse();

    let mut s: Vec<f64> = (0..m).map(|i| r0_full[i + 1] * r[i]).collect();
    let mut e = energy;
    let potential = |s: &[f64]| -> Vec<f64> {
        let q = Mat::from_fn(m, 1, |i, _| s[i] * s[i] / r[i]);
        let p = &d2_inv * &q;
        (0..m).map(|i| p[(i, 0)] - r[i] / l * c).collect()
    };
    let mut converged = false;
    for _ in 0..40 {
        let p = potential(&s);
        let u: Vec<f64> = (0..m).map(|i| e - p[i] / r[i]).collect();
        let mut f = Mat::<f64>::zeros(m + 1, 1);
        for i in 0..m {
            let mut acc = u[i] * s[i];
            for j in 0..m {
                acc += d2t[(i, j)] * s[j];
            }
            f[(i, 0)] = -acc;
        }
        f[(m, 0)] = -((0..m).map(|i| w[i] * s[i] * s[i]).sum::<f64>() - c);
        let mut jac = Mat::<f64>::zeros(m + 1, m + 1);
        for i in 0..m {
            for j in 0..m {
                jac[(i, j)] = d2t[(i, j)] - s[i] / r[i] * d2_inv[(i, j)] * 2.0 * s[j] / r[j];
            }
            jac[(i, i)] += u[i];
            jac[(i, m)] = s[i];
            jac[(m, i)] = 2.0 * w[i] * s[i];
        }
        let delta = jac.partial_piv_lu().solve(&f);
        let mut step = 0.0f64;
        let mut size = 0.0f64;
        for i in 0..m {
            s[i] += delta[(i, 0)];
            step = step.max(delta[(i, 0)].abs());
            size = size.max(s[i].abs());
        }
        e += delta[(m, 0)];
        if !(step.is_finite() && e.is_finite()) {
            break;
        }
        if step <= 1e-13 * size && delta[(m, 0)].abs() <= 1e-13 * e.abs() {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SolverError {
            reason: "stationary re-solve on the collocation nodes did not converge".into(),
            condition: condition(&d2t),
        });
    }

    let p = potential(&s);
    let mut s_full = vec![0.0; n + 1];
    s_full[1..n].copy_from_slice(&s);
    let mut p_full = vec![0.0; n + 1];
    p_full[1..n].copy_from_slice(&p);
    p_full[0] = -c;
    let d_r = grid.d_r();
    let slope = |v: &[f64]| d_r.row(n).iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
    let mut r0 = vec![0.0; n + 1];
    let mut u0 = vec![0.0; n + 1];
    for i in 1..n {
        r0[i] = s[i - 1] / r[i - 1];
        u0[i] = e - p[i - 1] / r[i - 1];
    }
    r0[n] = slope(&s_full);
    u0[0] = e + c / l;
    u0[n] = e - slope(&p_full);
    Ok((r0, u0, e))
}

impl PerturbationOperator {
    /// Builds the operator from `R₀`, `U₀` at all `N + 1` nodes (ordered like `grid.r()`).
    pub fn from_nodes(
        grid: &ChebyshevGrid,
        r0_full: Vec<f64>,
        u0_full: Vec<f64>,
        energy: f64,
        norm: f64,
    ) -> Result<Self> {
        let n = grid.degree();
        if r0_full.len() != n + 1 {
            return Err(Error::DimensionError { expected: n + 1, found: r0_full.len() });
        }
        if u0_full.len() != n + 1 {
            return Err(Error::DimensionError { expected: n + 1, found: u0_full.len() });
        }
        let m = grid.interior_len();
        let r0 = r0_full[1..n].to_vec();
        let u0 = u0_full[1..n].to_vec();
        let d2t = to_faer(grid.d2_trimmed());
        let d2_condition = condition(&d2t);
        if !(d2_condition <= 1e14) {
            return Err(Error::IllConditioned(d2_condition));
        }
        let d2_inv = d2t.partial_piv_lu().inverse();

        let h = Mat::from_fn(m, m, |i, j| d2t[(i, j)] + if i == j { u0[i] } else { 0.0 });
        let mut lhs = Mat::<f64>::zeros(3 * m, 3 * m);
        let mut rhs = Mat::<f64>::zeros(3 * m, 3 * m);
        let mut reduced = Mat::<f64>::zeros(2 * m, 2 * m);
        for i in 0..m {
            lhs[(i, i)] = -2.0 * r0[i];
            lhs[(2 * m + i, 2 * m + i)] = r0[i];
            rhs[(m + i, i)] = -1.0;
            rhs[(2 * m + i, m + i)] = 1.0;
            for j in 0..m {
                lhs[(i, 2 * m + j)] = d2t[(i, j)];
                lhs[(m + i, m + j)] = h[(i, j)];
                lhs[(2 * m + i, j)] = -h[(i, j)];
                reduced[(i, m + j)] = h[(i, j)];
                reduced[(m + i, j)] = h[(i, j)] - 2.0 * r0[i] * d2_inv[(i, j)] * r0[j];
            }
        }
        Ok(Self {
            grid: grid.clone(),
            state_index: 0,
            norm,
            energy,
            sampling: NodeSampling::Interpolated,
            r0,
            u0,
            r0_full,
            u0_full,
            d2t,
            d2_inv,
            d2_condition,
            lhs,
            rhs,
            reduced,
        })
    }

    pub fn grid(&self) -> &ChebyshevGrid {
        &self.grid
    }

    pub fn state_index(&self) -> usize {
        self.state_index
    }

    /// Norm of the background state the operator was built for.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Energy of the background at [`norm`](Self::norm).
    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn sampling(&self) -> NodeSampling {
        self.sampling
    }

    pub fn interior_len(&self) -> usize {
        self.r0.len()
    }

    /// `R₀` at the interior nodes.
    pub fn r0(&self) -> &[f64] {
        &self.r0
    }

    /// `U₀` at the interior nodes.
    pub fn u0(&self) -> &[f64] {
        &self.u0
    }

    pub fn r0_full(&self) -> &[f64] {
        &self.r0_full
    }

    pub fn u0_full(&self) -> &[f64] {
        &self.u0_full
    }

    /// `rR₀` at the interior nodes, the direction of `B` in the zero mode.
    pub fn zero_mode_direction(&self) -> Vec<f64> {
        self.r0.iter().zip(self.grid.interior_r()).map(|(v, r)| v * r).collect()
    }

    pub fn d2_trimmed(&self) -> &Mat<f64> {
        &self.d2t
    }

    pub fn d2_inverse(&self) -> &Mat<f64> {
        &self.d2_inv
    }

    pub fn d2_condition(&self) -> f64 {
        self.d2_condition
    }

    pub fn lhs(&self) -> &Mat<f64> {
        &self.lhs
    }

    pub fn rhs(&self) -> &Mat<f64> {
        &self.rhs
    }

    pub fn reduced(&self) -> &Mat<f64> {
        &self.reduced
    }
}
