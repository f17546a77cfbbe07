use approx::assert_relative_eq;
use snewton::diagnostics::{
    dispersion_acceleration, growth_bound, growth_bound_at_norm, quadrature_agreement, r0_cubed_bound,
    sobolev_chain_check, time_to_si, virial_check, PhysicalScales,
};
use snewton::stability::{analyze, StabilityOptions};
use snewton::stationary::{shoot, ShootOptions};
use snewton::ChebyshevGrid;

#[test]
fn virial_and_dispersion_vanish() {
    for n in 0..5 {
        let s = shoot(n, &ShootOptions::<f64>::default()).unwrap();
        assert!(virial_check(&s).max() < 1e-3, "state {n}");
        assert!(dispersion_acceleration(&s).abs() < 1e-3 * s.energy.abs());
    }
}

#[test]
fn cubic_norm_below_sobolev_bound() {
    for n in 0..5 {
        let s = shoot(n, &ShootOptions::<f64>::default()).unwrap();
        let (direct, bound) = r0_cubed_bound(&s);
        assert!(direct > 0.0 && direct <= bound, "state {n}: {direct} > {bound}");
        let t = s.normalized_to(3.0).unwrap();
        let (d3, b3) = r0_cubed_bound(&t);
        assert!(d3 <= b3);
    }
}

#[test]
fn chain_slack_nonnegative_for_all_modes() {
    for n in 0..2 {
        let s = shoot(n, &ShootOptions::<f64>::default()).unwrap();
        let a = analyze(&s, &StabilityOptions { n_nodes: 40, ..Default::default() }).unwrap();
        for m in a.modes.iter().filter(|m| m.is_physical()) {
            let c = sobolev_chain_check(m, &a.operator);
            assert!(c.slack >= -1e-10, "{}: {c:?}", m.lambda);
        }
    }
}

#[test]
fn quadratures_agree() {
    let s = shoot(1, &ShootOptions::default()).unwrap();
    let grid = ChebyshevGrid::new(80, 4.0 * s.trust_radius).unwrap();
    assert!(quadrature_agreement(&s, &grid).unwrap() < 1e-6);
}

#[test]
fn bound_scales_with_norm() {
    // E scales as I², so norm·bound(E) is the unit-norm bound scaled by I².
    let e1 = -0.05;
    let i = 3.0;
    let e = e1 * i * i;
    assert_relative_eq!(growth_bound_at_norm(e, i).unwrap(), i * i * growth_bound(e1).unwrap(), max_relative = 1e-14);
    assert!(growth_bound(0.0).is_err());
}

#[test]
fn time_conversion_inverts_gamma() {
    let s = PhysicalScales::new(6.674e-11, 1.0e-25, 1.0546e-34).unwrap();
    let t = time_to_si(&s, 2.5).unwrap();
    assert_relative_eq!(t * s.gamma(), 2.5, max_relative = 1e-14);
    assert!(PhysicalScales::new(-1.0, 1.0, 1.0).is_err());
}
