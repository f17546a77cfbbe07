//! Independent checks of spectral eigenpairs: collocation residuals of the
//! perturbation equations, and reconstruction of eigenfunctions by Runge–Kutta
//! integration of
//!
//! ```text
//! A'' = −U₀A + R₀W − iλB,   B'' = −U₀B − iλA,   W'' = 2R₀A
//! ```
//!
//! with `A = B = W = 0` at both ends.

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chebyshev::ChebyshevGrid;
use crate::error::{Error, Result};
use crate::profile::RadialProfile;
use crate::radial_ode::{integrate, FnSystem, Trigger};
use crate::stability::{EigenMode, ModeClass, PerturbationOperator};

fn full(n: usize, interior: &[Complex64]) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); n + 1];
    v[1..n].copy_from_slice(interior);
    v
}

fn apply(d: &crate::dense::Matrix<f64>, v: &[Complex64]) -> Vec<Complex64> {
    (0..v.len()).map(|i| d.row(i).iter().zip(v).map(|(&a, &b)| b * a).sum()).collect()
}

/// Largest residual of the three perturbation equations at the interior nodes,
/// each relative to the largest term of its equation.
pub fn ode_residual(mode: &EigenMode, op: &PerturbationOperator) -> f64 {
    let grid = op.grid();
    let n = grid.degree();
    let d2 = grid.d2();
    let (a, b, w) = (full(n, &mode.a), full(n, &mode.b), full(n, &mode.w));
    let (a2, b2, w2) = (apply(d2, &a), apply(d2, &b), apply(d2, &w));
    let il = Complex64::new(0.0, 1.0) * mode.lambda;
    let (r0, u0) = (op.r0_full(), op.u0_full());
    let mut worst = [0.0f64; 3];
    let mut scale = [0.0f64; 3];
    for i in 1..n {
        let terms = [
            [w2[i], -2.0 * r0[i] * a[i], Complex64::new(0.0, 0.0)],
            [b2[i], u0[i] * b[i], il * a[i]],
            [a2[i], u0[i] * a[i] - r0[i] * w[i], il * b[i]],
        ];
        for (k, t) in terms.iter().enumerate() {
            worst[k] = worst[k].max((t[0] + t[1] + t[2]).norm());
            scale[k] = scale[k].max(t.iter().fold(0.0f64, |m, z| m.max(z.norm())));
        }
    }
    (0..3)
        .map(|k| if scale[k] > 0.0 { worst[k] / scale[k] } else { 0.0 })
        .fold(0.0, f64::max)
}

/// The zero mode `(A, B, W) = (0, rR₀, 0)`, `λ = 0`, normalized like the spectral modes.
pub fn zero_mode(op: &PerturbationOperator) -> EigenMode {
    let m = op.interior_len();
    let zero = vec![Complex64::new(0.0, 0.0); m];
    let b: Vec<Complex64> = op.zero_mode_direction().into_iter().map(|v| Complex64::new(v, 0.0)).collect();
    let weights = op.grid().interior_weights();
    let norm: f64 = b.iter().zip(&weights).map(|(z, w)| w * z.norm_sqr()).sum::<f64>().sqrt();
    EigenMode {
        lambda: Complex64::new(0.0, 0.0),
        a: zero.clone(),
        b: b.into_iter().map(|z| z / norm).collect(),
        w: zero,
        class: ModeClass::ZeroMode,
        group: None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RkOptions {
    /// RK4 steps across `(0, L)`.
    pub steps: usize,
    pub r_min: f64,
    /// Radius where the outward and inward solutions are matched, as a fraction of `L`.
    pub match_fraction: f64,
    /// Samples of `R₀`, `U₀` used to evaluate the background between nodes.
    pub background_points: usize,
    /// Stored samples per side of the matching radius.
    pub output_points: usize,
}

impl Default for RkOptions {
    fn default() -> Self {
        Self { steps: 100_000, r_min: 1e-6, match_fraction: 0.1, background_points: 20_001, output_points: 4_000 }
    }
}

/// Eigenfunction rebuilt by integration, sampled on an ascending radial grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RkReconstruction {
    pub lambda: Complex64,
    /// Smallest singular value of `[Q_out, −Q_in]` for orthonormal bases of the
    /// outward and inward solution spaces at the matching radius; small iff `λ`
    /// is an eigenvalue.
    pub mismatch: f64,
    pub match_radius: f64,
    pub radius: Vec<f64>,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
    pub w: Vec<Complex64>,
}

impl RkReconstruction {
    /// `B` at the interior nodes of `grid`.
    pub fn b_at_nodes(&self, grid: &ChebyshevGrid) -> Result<Vec<Complex64>> {
        let re = RadialProfile::new(self.radius.clone(), self.b.iter().map(|z| z.re).collect())?;
        let im = RadialProfile::new(self.radius.clone(), self.b.iter().map(|z| z.im).collect())?;
        grid.interior_r()
            .iter()
            .map(|&r| Ok(Complex64::new(re.eval(r)?, im.eval(r)?)))
            .collect()
    }

    /// `|⟨B_rk, B⟩| / (‖B_rk‖ ‖B‖)` at the interior nodes of `grid`.
    pub fn cosine_with(&self, b: &[Complex64], grid: &ChebyshevGrid) -> Result<f64> {
        let mine = self.b_at_nodes(grid)?;
        Ok(crate::stability::cosine_similarity(&mine, b, &grid.interior_weights()))
    }
}

type Vec6 = [Complex64; 6];
type Triple = [Complex64; 3];

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Gram–Schmidt (applied twice) on three complex 6-vectors; returns `Q` and upper-triangular `R`.
fn orthonormalize(y: &[Vec6; 3]) -> Result<([Vec6; 3], [[Complex64; 3]; 3])> {
    let mut q = *y;
    let mut r = [[czero(); 3]; 3];
    for j in 0..3 {
        for _ in 0..2 {
            for i in 0..j {
                let p: Complex64 = (0..6).map(|k| q[i][k].conj() * q[j][k]).sum();
                r[i][j] += p;
                for k in 0..6 {
                    let v = q[i][k];
                    q[j][k] -= p * v;
                }
            }
        }
        let nrm = q[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(nrm > 0.0 && nrm.is_finite()) {
            return Err(Error::NumericalBlowup { radius: f64::NAN });
        }
        r[j][j] = Complex64::new(nrm, 0.0);
        for k in 0..6 {
            q[j][k] /= nrm;
        }
    }
    Ok((q, r))
}

fn solve_upper(r: &[[Complex64; 3]; 3], c: &Triple) -> Triple {
    let mut d = [czero(); 3];
    for i in (0..3).rev() {
        let mut acc = c[i];
        for j in i + 1..3 {
            acc -= r[i][j] * d[j];
        }
        d[i] = acc / r[i][i];
    }
    d
}

struct Segment {
    /// Independent variable at stored samples.
    t: Vec<f64>,
    /// Per sample, per basis solution: `(A, B, W)`.
    values: Vec<[Triple; 3]>,
    r: [[Complex64; 3]; 3],
}

struct Side {
    basis: [Vec6; 3],
    segments: Vec<Segment>,
}

fn to_vec6(y: &[f64], off: usize) -> Vec6 {
    let mut v = [czero(); 6];
    for (k, z) in v.iter_mut().enumerate() {
        *z = Complex64::new(y[off + 2 * k], y[off + 2 * k + 1]);
    }
    v
}

/// Propagates a 3-dimensional solution space of the 6-component complex
/// system `f'' = F(t, f)` from `t0` to `t1`, re-orthonormalizing between
/// segments short enough that no basis vector can swamp another.
#[allow(clippy::too_many_arguments)]
fn propagate(
    accel: &dyn Fn(f64, &[Complex64; 3], &mut [Complex64; 3]),
    start: [Vec6; 3],
    t0: f64,
    t1: f64,
    segment: f64,
    step: f64,
    keep_every: usize,
) -> Result<Side> {
    let sys = FnSystem::new(36, |t: f64, y: &[f64], d: &mut [f64]| {
        for s in 0..3 {
            let o = 12 * s;
            let f = [
                Complex64::new(y[o], y[o + 1]),
                Complex64::new(y[o + 2], y[o + 3]),
                Complex64::new(y[o + 4], y[o + 5]),
            ];
            let mut a = [czero(); 3];
            accel(t, &f, &mut a);
            d[o..o + 6].copy_from_slice(&y[o + 6..o + 12]);
            for k in 0..3 {
                d[o + 6 + 2 * k] = a[k].re;
                d[o + 7 + 2 * k] = a[k].im;
            }
        }
    });
    let n_seg = ((t1 - t0) / segment).ceil().max(1.0) as usize;
    let mut basis = start;
    let mut segments = Vec::with_capacity(n_seg);
    for k in 0..n_seg {
        let a = t0 + (t1 - t0) * k as f64 / n_seg as f64;
        let b = if k + 1 == n_seg { t1 } else { t0 + (t1 - t0) * (k + 1) as f64 / n_seg as f64 };
        let mut y0 = [0.0; 36];
        for s in 0..3 {
            for c in 0..6 {
                y0[12 * s + 2 * c] = basis[s][c].re;
                y0[12 * s + 2 * c + 1] = basis[s][c].im;
            }
        }
        let h = ((b - a) / ((b - a) / step).ceil().max(1.0)).min(b - a);
        let path = integrate(&sys, &y0, a, b, h, &Trigger::Never)?;
        let mut t = Vec::new();
        let mut values = Vec::new();
        for i in 0..path.len() {
            if i % keep_every == 0 || i + 1 == path.len() {
                let y = path.sample(i);
                t.push(path.grid[i]);
                let mut v = [[czero(); 3]; 3];
                for s in 0..3 {
                    for c in 0..3 {
                        v[s][c] = Complex64::new(y[12 * s + 2 * c], y[12 * s + 2 * c + 1]);
                    }
                }
                values.push(v);
            }
        }
        let end = path.last();
        let y_end = [to_vec6(end, 0), to_vec6(end, 12), to_vec6(end, 24)];
        let (q, r) = orthonormalize(&y_end)?;
        basis = q;
        segments.push(Segment { t, values, r });
    }
    Ok(Side { basis, segments })
}

/// Samples of the solution whose coefficients in the final basis are `c`.
fn unwind(side: &Side, c: Triple) -> Vec<(f64, Triple)> {
    let mut out = Vec::new();
    let mut coef = c;
    for seg in side.segments.iter().rev() {
        let d = solve_upper(&seg.r, &coef);
        for (t, v) in seg.t.iter().zip(&seg.values).rev() {
            let mut f = [czero(); 3];
            for s in 0..3 {
                for k in 0..3 {
                    f[k] += d[s] * v[s][k];
                }
            }
            out.push((*t, f));
        }
        coef = d;
    }
    out.reverse();
    out
}

/// Integrates the perturbation equations from both ends, spanning the three
/// solutions regular at each end, and matches values and slopes at an
/// interior radius.
pub fn rk_reconstruct(lambda: Complex64, op: &PerturbationOperator, opts: &RkOptions) -> Result<RkReconstruction> {
    let grid = op.grid();
    let l = grid.length();
    if !(opts.match_fraction > 0.0 && opts.match_fraction < 1.0) || opts.steps < 2 {
        return Err(Error::InvalidArgument("match_fraction must lie in (0, 1) and steps >= 2".into()));
    }
    let r0 = RadialProfile::from_fn(0.0, l, opts.background_points, |r| grid.interpolate(op.r0_full(), r))?;
    let u0 = RadialProfile::from_fn(0.0, l, opts.background_points, |r| grid.interpolate(op.u0_full(), r))?;
    let il = Complex64::new(0.0, 1.0) * lambda;
    let accel = |r: f64, f: &[Complex64; 3], a: &mut [Complex64; 3]| {
        let rr = r.clamp(0.0, l);
        let (p, u) = (r0.eval(rr).unwrap_or(0.0), u0.eval(rr).unwrap_or(0.0));
        a[0] = -u * f[0] + p * f[2] - il * f[1];
        a[1] = -u * f[1] - il * f[0];
        a[2] = 2.0 * p * f[0];
    };
    // local growth rate bounds how far a basis can be carried before re-orthonormalizing
    let kappa = op
        .u0_full()
        .iter()
        .fold(0.0f64, |m, &u| m.max(u.abs()))
        .max(lambda.norm())
        .sqrt()
        .max(1e-3);
    let segment = (1.0 / kappa).min(l);
    let step = l / opts.steps as f64;
    let r_match = opts.match_fraction * l;
    let keep = |len: f64| ((len / step) / opts.output_points as f64).ceil().max(1.0) as usize;

    let unit = |k: usize, value: f64| {
        let mut v = [czero(); 6];
        v[k] = Complex64::new(value, 0.0);
        v[3 + k] = Complex64::new(1.0, 0.0);
        let n = (value * value + 1.0).sqrt();
        v.map(|z| z / n)
    };
    let out_start = [unit(0, opts.r_min), unit(1, opts.r_min), unit(2, opts.r_min)];
    let outward = propagate(&accel, out_start, opts.r_min, r_match, segment, step, keep(r_match))?;
    let in_start = [unit(0, 0.0), unit(1, 0.0), unit(2, 0.0)];
    let inward_accel = |s: f64, f: &[Complex64; 3], a: &mut [Complex64; 3]| accel(l - s, f, a);
    let inward = propagate(&inward_accel, in_start, 0.0, l - r_match, segment, step, keep(l - r_match))?;

    // inward slopes are d/ds = −d/dr
    let mat = Mat::<Complex64>::from_fn(6, 6, |i, j| {
        if j < 3 {
            outward.basis[j][i]
        } else {
            let v = inward.basis[j - 3][i];
            if i < 3 { -v } else { v }
        }
    });
    let svd = mat.svd().map_err(|e| Error::SolverError { reason: format!("svd failed: {e:?}"), condition: f64::NAN })?;
    let s = svd.S().column_vector();
    let v = svd.V();
    let (imin, mismatch) = (0..6).map(|i| (i, s[i].re)).fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    let c_out = [v[(0, imin)], v[(1, imin)], v[(2, imin)]];
    let c_in = [v[(3, imin)], v[(4, imin)], v[(5, imin)]];

    let mut radius = vec![0.0];
    let (mut a, mut b, mut w) = (vec![czero()], vec![czero()], vec![czero()]);
    let mut last = 0.0;
    let mut push = |r: f64, f: Triple| {
        if r > last {
            last = r;
            radius.push(r);
            a.push(f[0]);
            b.push(f[1]);
            w.push(f[2]);
        }
    };
    for (t, f) in unwind(&outward, c_out) {
        push(t, f);
    }
    for (t, f) in unwind(&inward, c_in).into_iter().rev() {
        push(l - t, f);
    }

    let mut rec = RkReconstruction { lambda, mismatch, match_radius: r_match, radius, a, b, w };
    normalize_samples(&mut rec);
    Ok(rec)
}

fn normalize_samples(rec: &mut RkReconstruction) {
    let mut total = 0.0;
    for i in 1..rec.radius.len() {
        let h = rec.radius[i] - rec.radius[i - 1];
        let f = |j: usize| rec.a[j].norm_sqr() + rec.b[j].norm_sqr();
        total += 0.5 * h * (f(i) + f(i - 1));
    }
    if total > 0.0 && total.is_finite() {
        let s = 1.0 / total.sqrt();
        for z in rec.a.iter_mut().chain(rec.b.iter_mut()).chain(rec.w.iter_mut()) {
            *z *= s;
        }
    }
}
