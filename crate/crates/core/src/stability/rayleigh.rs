use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::operator::PerturbationOperator;
use super::EigenMode;
use crate::chebyshev::ChebyshevGrid;

/// Residuals of the two integral identities
/// `−iλ∫ĀB = ∫(U₀|A|² − |A_r|² + ½|W_r|²)` and `−iλ∫AB̄ = ∫(U₀|B|² − |B_r|²)`,
/// each relative to the sum of the magnitudes of its terms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RayleighCheck {
    pub first: f64,
    pub second: f64,
    /// Relative imaginary parts of the left-hand sides; the right-hand sides are real.
    pub first_imag: f64,
    pub second_imag: f64,
}

impl RayleighCheck {
    pub fn max(&self) -> f64 {
        self.first.max(self.second)
    }
}

fn full(grid: &ChebyshevGrid, interior: &[Complex64]) -> Vec<Complex64> {
    let n = grid.degree();
    let mut v = vec![Complex64::new(0.0, 0.0); n + 1];
    v[1..n].copy_from_slice(interior);
    v
}

fn derivative(d: &crate::dense::Matrix<f64>, v: &[Complex64]) -> Vec<Complex64> {
    (0..v.len()).map(|i| d.row(i).iter().zip(v).map(|(&a, &b)| b * a).sum()).collect()
}

/// Integrals use Clenshaw–Curtis on a degree-3N grid, onto which the
/// degree-N interpolants are carried, so products like `U₀|A|²` are integrated exactly.
pub fn rayleigh_residual(mode: &EigenMode, op: &PerturbationOperator) -> RayleighCheck {
    let grid = op.grid();
    let fine = ChebyshevGrid::new(3 * grid.degree(), grid.length()).expect("degree at least 2");
    let d = grid.d_r();
    let (a, b, w) = (full(grid, &mode.a), full(grid, &mode.b), full(grid, &mode.w));
    let (ar, br, wr) = (derivative(&d, &a), derivative(&d, &b), derivative(&d, &w));
    let lift = |v: &[Complex64]| -> Vec<Complex64> {
        let re: Vec<f64> = v.iter().map(|z| z.re).collect();
        let im: Vec<f64> = v.iter().map(|z| z.im).collect();
        fine.r()
            .iter()
            .map(|&r| Complex64::new(grid.interpolate(&re, r), grid.interpolate(&im, r)))
            .collect()
    };
    let (a, b, ar, br, wr) = (lift(&a), lift(&b), lift(&ar), lift(&br), lift(&wr));
    let u0: Vec<f64> = fine.r().iter().map(|&r| grid.interpolate(op.u0_full(), r)).collect();
    let quad_r = |f: &dyn Fn(usize) -> f64| fine.quad(&(0..a.len()).map(f).collect::<Vec<_>>()).unwrap();
    let quad_c = |f: &dyn Fn(usize) -> Complex64| {
        let re = quad_r(&|i| f(i).re);
        let im = quad_r(&|i| f(i).im);
        Complex64::new(re, im)
    };
    let factor = Complex64::new(0.0, -1.0) * mode.lambda;
    let lhs1 = factor * quad_c(&|i| a[i].conj() * b[i]);
    let lhs2 = factor * quad_c(&|i| a[i] * b[i].conj());
    let ua = quad_r(&|i| u0[i] * a[i].norm_sqr());
    let ar2 = quad_r(&|i| ar[i].norm_sqr());
    let wr2 = quad_r(&|i| wr[i].norm_sqr());
    let ub = quad_r(&|i| u0[i] * b[i].norm_sqr());
    let br2 = quad_r(&|i| br[i].norm_sqr());
    let rhs1 = ua - ar2 + 0.5 * wr2;
    let rhs2 = ub - br2;
    let scale1 = lhs1.norm() + ua.abs() + ar2 + 0.5 * wr2;
    let scale2 = lhs2.norm() + ub.abs() + br2;
    let rel = |x: f64, s: f64| if s > 0.0 { x / s } else { x };
    RayleighCheck {
        first: rel((lhs1 - rhs1).norm(), scale1),
        second: rel((lhs2 - rhs2).norm(), scale2),
        first_imag: rel(lhs1.im.abs(), scale1),
        second_imag: rel(lhs2.im.abs(), scale2),
    }
}
