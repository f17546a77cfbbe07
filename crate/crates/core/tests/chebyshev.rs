use proptest::prelude::*;
use snewton::chebyshev::{chebyshev_points, clenshaw_curtis_weights, differentiation_matrix};
use snewton::ChebyshevGrid;

fn cheb_t(k: usize, x: f64) -> f64 {
    (k as f64 * x.clamp(-1.0, 1.0).acos()).cos()
}

proptest! {
    #[test]
    fn derivative_exact_on_polynomials(n in 2usize..40, k in 0usize..40) {
        prop_assume!(k <= n);
        let x: Vec<f64> = chebyshev_points(n);
        let d = differentiation_matrix::<f64>(n);
        // T_k' = k U_{k−1}, with U_{k−1}(cos θ) = sin kθ / sin θ
        let p: Vec<f64> = x.iter().map(|&v| cheb_t(k, v)).collect();
        let dp = d.mul_vec(&p);
        for (&xi, &di) in x.iter().zip(&dp) {
            let want = if (1.0 - xi.abs()) < 1e-15 {
                (k * k) as f64 * xi.signum().powi(k as i32 + 1)
            } else {
                let t = xi.acos();
                k as f64 * (k as f64 * t).sin() / t.sin()
            };
            prop_assert!((di - want).abs() <= 1e-11 * (n * n) as f64, "{} vs {}", di, want);
        }
    }

    #[test]
    fn quadrature_exact_on_even_polynomials(n in 2usize..60, j in 0usize..30) {
        let k = 2 * j;
        prop_assume!(k <= n);
        let x: Vec<f64> = chebyshev_points(n);
        let w = clenshaw_curtis_weights::<f64>(n);
        let got: f64 = x.iter().zip(&w).map(|(&v, &wi)| wi * v.powi(k as i32)).sum();
        prop_assert!((got - 2.0 / (k as f64 + 1.0)).abs() < 1e-13);
    }

    #[test]
    fn physical_grid_integrates_monomials(n in 8usize..40, length in 1.0f64..500.0) {
        let g = ChebyshevGrid::new(n, length).unwrap();
        let vals: Vec<f64> = g.r().iter().map(|r| r * r).collect();
        let want = length.powi(3) / 3.0;
        prop_assert!((g.quad(&vals).unwrap() - want).abs() < 1e-12 * want);
    }
}

#[test]
fn interpolation_reproduces_cubic() {
    let g = ChebyshevGrid::new(12, 10.0).unwrap();
    let f = |r: f64| 1.0 - 0.5 * r + 0.02 * r * r * r;
    let vals: Vec<f64> = g.r().iter().map(|&r| f(r)).collect();
    for r in [0.0, 0.37, 5.0, 9.99] {
        assert!((g.interpolate(&vals, r) - f(r)).abs() < 1e-12);
    }
}

#[test]
fn invalid_grids_rejected() {
    assert!(ChebyshevGrid::new(1, 10.0).is_err());
    assert!(ChebyshevGrid::new(10, -1.0).is_err());
}
