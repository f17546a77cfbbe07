use approx::assert_relative_eq;
use snewton::diagnostics::virial_check;
use snewton::stationary::{count_nodes, extract_energy, loglog_slope, rescale, shoot, spectrum_table, ShootOptions};
use snewton::{Profile, State};

const TABLE: [f64; 6] = [-0.163, -0.0308, -0.0125, -0.00675, -0.00421, -0.00287];

fn state(n: usize) -> State {
    shoot(n, &ShootOptions::default()).expect("shooting converges")
}

#[test]
fn low_states_match_table() {
    for (n, want) in TABLE.iter().enumerate() {
        let s = state(n);
        assert_eq!(s.nodes(), n);
        assert!((s.tabulated_energy() - want).abs() <= 5e-3 * want.abs(), "n = {n}: {}", s.tabulated_energy());
    }
}

#[test]
fn energies_negative_and_ordered() {
    let table = spectrum_table(6, &ShootOptions::<f64>::default()).unwrap();
    for w in table.windows(2) {
        assert!(w[0].1 < w[1].1 && w[1].1 < 0.0);
    }
}

#[test]
fn independent_of_trial_central_value() {
    let a = state(1);
    let b = shoot(1, &ShootOptions { u_center: 2.0, ..Default::default() }).unwrap();
    assert_relative_eq!(a.energy, b.energy, max_relative = 1e-5);
    assert_relative_eq!(a.kinetic, b.kinetic, max_relative = 1e-4);
}

#[test]
fn unit_norm_and_virial() {
    for n in 0..3 {
        let s = state(n);
        assert_relative_eq!(s.norm, 1.0, max_relative = 1e-10);
        assert!(virial_check(&s).max() < 1e-4);
    }
}

// S = rψ and V = rU satisfy S'' = −SV/r and V'' = −S²/r; checked by central differences.
fn ode_defect(psi: &Profile, u: &Profile, r_hi: f64) -> f64 {
    let g = psi.grid();
    let (p, q) = (psi.values(), u.values());
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 1..g.len() - 1 {
        let r = g[i];
        if r < 0.5 || r > r_hi {
            continue;
        }
        let h = g[i + 1] - g[i];
        let s = |k: usize| g[k] * p[k];
        let v = |k: usize| g[k] * q[k];
        let s2 = (s(i + 1) - 2.0 * s(i) + s(i - 1)) / (h * h);
        let v2 = (v(i + 1) - 2.0 * v(i) + v(i - 1)) / (h * h);
        worst = worst.max((s2 + s(i) * v(i) / r).abs()).max((v2 + s(i) * s(i) / r).abs());
        scale = scale.max(s2.abs()).max(v2.abs());
    }
    worst / scale
}

#[test]
fn rescaled_profiles_still_solve_equations() {
    let s = state(0);
    let base = ode_defect(&s.r0, &s.u0, s.trust_radius);
    let (p, u) = rescale(&s.r0, &s.u0, 2.0).unwrap();
    let scaled = ode_defect(&p, &u, s.trust_radius / 2.0);
    assert!(base < 1e-4 && scaled < 1e-4, "{base} {scaled}");

    let t = s.rescaled(2.0).unwrap();
    assert_relative_eq!(t.energy, 4.0 * s.energy, max_relative = 1e-12);
    assert_relative_eq!(t.norm, 2.0 * s.norm, max_relative = 1e-12);
    assert_relative_eq!(t.energy_at_norm(1.0), s.energy, max_relative = 1e-12);
}

#[test]
fn energy_fit_recovers_coulomb_tail() {
    let u = Profile::from_fn(1.0, 200.0, 2001, |r| -0.05 + 0.3 / r).unwrap();
    let fit = extract_energy(&u, 0.2, 1e-10).unwrap();
    assert_relative_eq!(fit.energy, -0.05, epsilon = 1e-12);
    assert_relative_eq!(fit.coefficient, 0.3, epsilon = 1e-10);
}

#[test]
fn node_count_of_known_profile() {
    let p = Profile::from_fn(0.0, 10.0, 1001, |r| (r + 0.3).cos()).unwrap();
    assert_eq!(count_nodes(&p, 10.0), 3);
    assert_eq!(count_nodes(&p, 2.0), 1);
}

#[test]
fn slope_of_pure_power_law() {
    let table: Vec<(usize, f64)> = (1..=20).map(|n| (n, -3.0 / (n as f64).powi(2))).collect();
    assert_relative_eq!(loglog_slope(&table, 10, 20).unwrap(), -2.0, epsilon = 1e-12);
    assert!(loglog_slope(&table, 0, 20).is_err());
}

#[test]
fn single_precision_ground_state() {
    let s = shoot(0, &ShootOptions::<f32> { profile_points: 20001, steps: 20000, ..Default::default() }).unwrap();
    assert!((s.tabulated_energy() + 0.163).abs() < 5e-3 * 0.163, "{}", s.tabulated_energy());
}
