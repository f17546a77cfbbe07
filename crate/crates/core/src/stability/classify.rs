use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{EigenMode, ModeClass};
use crate::chebyshev::ChebyshevGrid;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Largest `|λ|` accepted for the zero mode.
    pub zero: f64,
    /// `|Re λ|` below this counts as purely imaginary.
    pub real: f64,
    /// Relative tolerance when matching `λ` to `−λ` and `conj λ`.
    pub pair: f64,
    /// Largest `sup|A|/sup|B|` and `sup|W|/sup|B|` in the zero mode.
    pub zero_shape: f64,
    /// Smallest cosine between `B` and `rR₀` in the zero mode.
    pub zero_cosine: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { zero: 1e-5, real: 1e-5, pair: 1e-8, zero_shape: 1e-4, zero_cosine: 0.999 }
    }
}

fn sup(v: &[Complex64]) -> f64 {
    v.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// `|⟨u, v⟩| / (‖u‖‖v‖)` with the given weights.
pub fn cosine(u: &[Complex64], v: &[Complex64], weights: &[f64]) -> f64 {
    let mut uv = Complex64::new(0.0, 0.0);
    let (mut uu, mut vv) = (0.0, 0.0);
    for i in 0..u.len() {
        uv += u[i].conj() * v[i] * weights[i];
        uu += u[i].norm_sqr() * weights[i];
        vv += v[i].norm_sqr() * weights[i];
    }
    if uu == 0.0 || vv == 0.0 {
        return 0.0;
    }
    uv.norm() / (uu * vv).sqrt()
}

fn close(x: Complex64, y: Complex64, tol: f64) -> bool {
    (x - y).norm() <= tol * x.norm().max(y.norm()) + 1e-14
}

/// Tags every mode. `reference` is the zero-mode direction of `B` (`rR₀` on
/// the interior nodes) and `weights` the interior quadrature weights.
///
/// Unmatched modes are tagged `Spurious` and logged; nothing is dropped.
pub fn classify(mut modes: Vec<EigenMode>, reference: &[f64], weights: &[f64], tol: &Tolerances) -> Vec<EigenMode> {
    let refc: Vec<Complex64> = reference.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    for mode in modes.iter_mut() {
        mode.group = None;
        if mode.class != ModeClass::Spurious {
            mode.class = ModeClass::Unclassified;
        }
        if !mode.is_finite() {
            mode.class = ModeClass::Spurious;
        }
    }
    for mode in modes.iter_mut().filter(|m| m.class == ModeClass::Unclassified) {
        if mode.lambda.norm() < tol.zero {
            let sb = sup(&mode.b);
            let flat = sb > 0.0 && sup(&mode.a) < tol.zero_shape * sb && sup(&mode.w) < tol.zero_shape * sb;
            if flat && cosine(&mode.b, &refc, weights) > tol.zero_cosine {
                mode.class = ModeClass::ZeroMode;
            }
        }
    }

    let mut order: Vec<usize> = (0..modes.len())
        .filter(|&i| modes[i].class == ModeClass::Unclassified)
        .collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (modes[i].lambda, modes[j].lambda);
        a.norm().total_cmp(&b.norm()).then(a.im.total_cmp(&b.im)).then(a.re.total_cmp(&b.re))
    });
    let mut group = 0;
    let mut taken = vec![false; modes.len()];
    let find = |modes: &[EigenMode], taken: &[bool], target: Complex64, skip: &[usize]| {
        order
            .iter()
            .copied()
            .filter(|&j| !taken[j] && !skip.contains(&j))
            .filter(|&j| close(modes[j].lambda, target, tol.pair))
            .min_by(|&a, &b| (modes[a].lambda - target).norm().total_cmp(&(modes[b].lambda - target).norm()))
    };
    for &i in &order {
        if taken[i] {
            continue;
        }
        let l = modes[i].lambda;
        let re_small = l.re.abs() < tol.real;
        let im_small = l.im.abs() < tol.real;
        if re_small || im_small {
            // ±iν pairs, and real pairs ±μ as degenerate quadruples
            let partner = find(&modes, &taken, -l, &[i]).or_else(|| find(&modes, &taken, l.conj(), &[i]));
            match partner {
                Some(j) => {
                    let class = if re_small { ModeClass::ImaginaryPair } else { ModeClass::ComplexQuadruple };
                    for k in [i, j] {
                        taken[k] = true;
                        modes[k].class = class;
                        modes[k].group = Some(group);
                    }
                    group += 1;
                }
                None => {
                    log::warn!("eigenvalue {l} has no partner -λ; tagged spurious");
                    taken[i] = true;
                    modes[i].class = ModeClass::Spurious;
                }
            }
            continue;
        }
        let mut members = vec![i];
        for target in [-l, l.conj(), -l.conj()] {
            if let Some(j) = find(&modes, &taken, target, &members) {
                members.push(j);
            }
        }
        if members.len() == 4 {
            for &k in &members {
                taken[k] = true;
                modes[k].class = ModeClass::ComplexQuadruple;
                modes[k].group = Some(group);
            }
            group += 1;
        } else {
            log::warn!("eigenvalue {l} matched only {} of its quadruple; tagged spurious", members.len());
            taken[i] = true;
            modes[i].class = ModeClass::Spurious;
        }
    }
    modes
}

/// Distinct quadruples (real pairs count as degenerate quadruples).
pub fn quadruple_count(modes: &[EigenMode]) -> usize {
    let mut groups: Vec<usize> = modes
        .iter()
        .filter(|m| m.class == ModeClass::ComplexQuadruple)
        .filter_map(|m| m.group)
        .collect();
    groups.sort_unstable();
    groups.dedup();
    groups.len()
}

/// `Q = |∫ conj(A) B dr| / (‖A‖ ‖B‖)` over `(0, L)`.
pub fn dichotomy_q(mode: &EigenMode, grid: &ChebyshevGrid) -> Result<f64> {
    let w = grid.interior_weights();
    let mut ab = Complex64::new(0.0, 0.0);
    let (mut aa, mut bb) = (0.0, 0.0);
    for i in 0..w.len() {
        ab += mode.a[i].conj() * mode.b[i] * w[i];
        aa += mode.a[i].norm_sqr() * w[i];
        bb += mode.b[i].norm_sqr() * w[i];
    }
    let den = (aa * bb).sqrt();
    if !(den > 0.0) {
        return Err(Error::DegenerateMode);
    }
    Ok(ab.norm() / den)
}
