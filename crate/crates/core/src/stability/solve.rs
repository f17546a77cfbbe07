use faer::linalg::solvers::{Eigen, GeneralizedEigen};
use faer::Mat;
use num_complex::Complex64;

use super::operator::PerturbationOperator;
use super::{EigenMode, ModeClass};
use crate::error::{Error, Result};

/// Generalized eigenvalues `α/β` above this magnitude are treated as infinite.
const INFINITE_RATIO: f64 = 1e10;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Scales to `∫(|A|² + |B|²) dr = 1` and rotates the largest entry of `B`
/// (or of `A` when `B` vanishes) onto the positive real axis.
pub(crate) fn normalize(mode: &mut EigenMode, weights: &[f64]) {
    let total: f64 = weights
        .iter()
        .enumerate()
        .map(|(i, w)| w * (mode.a[i].norm_sqr() + mode.b[i].norm_sqr()))
        .sum();
    if !(total > 0.0) || !total.is_finite() {
        return;
    }
    let pick = |v: &[Complex64]| {
        v.iter()
            .cloned()
            .fold(c(0.0), |best, z| if z.norm() > best.norm() { z } else { best })
    };
    let pb = pick(&mode.b);
    let pa = pick(&mode.a);
    let pivot = if pb.norm() >= 1e-8 * pa.norm() { pb } else { pa };
    let phase = if pivot.norm() > 0.0 { pivot.conj() / pivot.norm() } else { c(1.0) };
    let s = phase / total.sqrt();
    for v in mode.a.iter_mut().chain(mode.b.iter_mut()).chain(mode.w.iter_mut()) {
        *v *= s;
    }
}

fn solver_error(op: &PerturbationOperator, reason: String) -> Error {
    Error::SolverError { reason, condition: op.d2_condition() }
}

/// Eigenpairs of the pencil `LHS v = iλ RHS v` by dense QZ.
pub fn solve_full(op: &PerturbationOperator) -> Result<Vec<EigenMode>> {
    let m = op.interior_len();
    let gevd = GeneralizedEigen::new_from_real(op.lhs().as_ref(), op.rhs().as_ref())
        .map_err(|e| solver_error(op, format!("generalized eigensolver failed: {e:?}")))?;
    let alpha = gevd.S_a();
    let beta = gevd.S_b();
    let u = gevd.U();
    let weights = op.grid().interior_weights();
    let mut modes = Vec::with_capacity(3 * m);
    for k in 0..3 * m {
        let a = alpha[k];
        let b = beta[k];
        let sigma = a / b;
        let infinite = !(sigma.re.is_finite() && sigma.im.is_finite()) || sigma.norm() > INFINITE_RATIO;
        let lambda = if infinite {
            Complex64::new(f64::INFINITY, f64::INFINITY)
        } else {
            Complex64::new(0.0, -1.0) * sigma
        };
        let col = |off: usize| (0..m).map(|i| u[(off + i, k)]).collect::<Vec<_>>();
        let mut mode = EigenMode {
            lambda,
            a: col(0),
            b: col(m),
            w: col(2 * m),
            class: if infinite { ModeClass::Spurious } else { ModeClass::Unclassified },
            group: None,
        };
        normalize(&mut mode, &weights);
        modes.push(mode);
    }
    Ok(modes)
}

/// Eigenpairs of the reduced problem `M (A, B) = −iλ (A, B)`, with
/// `W = D2⁻¹(2R₀A)` recovered afterwards.
pub fn solve_reduced(op: &PerturbationOperator) -> Result<Vec<EigenMode>> {
    let m = op.interior_len();
    let evd = Eigen::new_from_real(op.reduced().as_ref())
        .map_err(|e| solver_error(op, format!("eigensolver failed: {e:?}")))?;
    let s = evd.S();
    let u = evd.U();
    let weights = op.grid().interior_weights();
    let d2_inv = op.d2_inverse();
    let r0 = op.r0();
    let mut modes = Vec::with_capacity(2 * m);
    for k in 0..2 * m {
        let tau = s[k];
        let a: Vec<Complex64> = (0..m).map(|i| u[(i, k)]).collect();
        let b: Vec<Complex64> = (0..m).map(|i| u[(m + i, k)]).collect();
        let src_re = Mat::from_fn(m, 1, |i, _| 2.0 * r0[i] * a[i].re);
        let src_im = Mat::from_fn(m, 1, |i, _| 2.0 * r0[i] * a[i].im);
        let wr = d2_inv * &src_re;
        let wi = d2_inv * &src_im;
        let w = (0..m).map(|i| Complex64::new(wr[(i, 0)], wi[(i, 0)])).collect();
        let mut mode = EigenMode {
            lambda: Complex64::new(0.0, 1.0) * tau,
            a,
            b,
            w,
            class: ModeClass::Unclassified,
            group: None,
        };
        normalize(&mut mode, &weights);
        modes.push(mode);
    }
    Ok(modes)
}
