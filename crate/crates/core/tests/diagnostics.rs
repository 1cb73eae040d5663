use std::f64::consts::PI;

use bihnls::diagnostics::{
    default_pair_family, energy, interpolation_ratio, lebesgue_norm, mass, modified_energy, modified_kinetic,
    scattering_residual, sobolev_norm, spacetime_norm, spacetime_norm_from_samples, z_i_norm, RowParams,
};
use bihnls::dynamics::{evolve, SolverConfig, Trajectory};
use bihnls::experiments::{gaussian_bumps, InitialData};
use bihnls::exponents::admissibility;
use bihnls::spectral::{Field, Grid};
use num_complex::Complex64;
use proptest::prelude::*;

const PARAMS: RowParams = RowParams { nu: 3.0, gamma: 1.5, cutoff: 8.0, sigma: 0.5 };

/// Gaussian of width `w` centred in the box, with its exact second derivative.
fn gaussian(x: f64, c: f64, w: f64, a: f64) -> (f64, f64) {
    let y = x - c;
    let g = a * (-y * y / (2.0 * w * w)).exp();
    (g, g * (y * y / w.powi(4) - 1.0 / (w * w)))
}

#[test]
fn mass_and_energy_match_direct_sums() {
    let (ell, n, w, a, nu) = (40.0, 256, 1.5, 0.8, 3.0);
    let grid = Grid::new(1, n, ell).unwrap();
    let f = Field::from_fn(grid, |x| Complex64::new(gaussian(x[0], ell / 2.0, w, a).0, 0.0)).unwrap();
    let h = ell / n as f64;
    let (mut m, mut kin, mut pot) = (0.0, 0.0, 0.0);
    for j in 0..n {
        let (g, g2) = gaussian(j as f64 * h, ell / 2.0, w, a);
        m += g * g * h;
        kin += 0.5 * g2 * g2 * h;
        pot += g.abs().powf(nu + 1.0) / (nu + 1.0) * h;
    }
    assert!((mass(&f) - m).abs() <= 1e-12 * m);
    assert!((m - a * a * w * PI.sqrt()).abs() <= 1e-10 * m);
    let e = energy(&f, nu);
    assert!((e - (kin + pot)).abs() <= 1e-10 * e, "{e} vs {}", kin + pot);
}

#[test]
fn lebesgue_norm_of_a_constant() {
    let grid = Grid::new(2, 16, 3.0).unwrap();
    let f = Field::from_fn(grid, |_| Complex64::new(0.0, 2.0)).unwrap();
    for q in [1.0, 2.0, 4.5] {
        assert!((lebesgue_norm(&f, q).unwrap() - 2.0 * 9f64.powf(1.0 / q)).abs() < 1e-12);
    }
    assert_eq!(lebesgue_norm(&f, f64::INFINITY).unwrap(), 2.0);
    assert!(lebesgue_norm(&f, 0.5).is_err());
}

fn bumps(grid: Grid, seed: u64) -> Field {
    gaussian_bumps(grid, &InitialData { bumps: 3, width_min: 0.5, width_max: 1.5, ..InitialData::default() }, 1.5, seed)
        .unwrap()
}

#[test]
fn sobolev_equivalence_constant_is_at_most_two() {
    let grid = Grid::new(1, 256, 30.0).unwrap();
    for seed in 0..10 {
        let f = bumps(grid, seed);
        let full = sobolev_norm(&f, 2.0, false).powi(2);
        let split = f.l2_norm().powi(2) + sobolev_norm(&f, 2.0, true).powi(2);
        let ratio = full / split;
        assert!((0.5..=2.0).contains(&ratio), "seed {seed}: {ratio}");
    }
}

#[test]
fn modified_energy_reduces_to_energy_at_large_cutoff() {
    let grid = Grid::new(1, 128, 20.0).unwrap();
    let f = bumps(grid, 3);
    let e = energy(&f, 3.0);
    let big = 2.0 * grid.max_radius();
    assert!((modified_energy(&f, 3.0, big, 1.5).unwrap() - e).abs() <= 1e-12 * e);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn modified_kinetic_never_exceeds_kinetic(seed in 0u64..1000, cutoff in 0.5f64..20.0, gamma in 0.0f64..1.99) {
        let grid = Grid::new(1, 128, 20.0).unwrap();
        let f = bumps(grid, seed);
        let full = 0.5 * sobolev_norm(&f, 2.0, true).powi(2);
        prop_assert!(modified_kinetic(&f, cutoff, gamma).unwrap() <= full * (1.0 + 1e-12));
    }
}

#[test]
fn trapezoid_with_p_equal_q_two() {
    let times: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
    let values: Vec<f64> = times.iter().map(|t| (1.0 + t).sqrt()).collect();
    // g² = 1 + t is linear, so the trapezoid rule is exact: ∫₀¹ (1 + t) dt = 3/2.
    let got = spacetime_norm_from_samples(&times, &values, 2.0).unwrap();
    assert!((got - 1.5f64.sqrt()).abs() < 1e-14);
    assert_eq!(spacetime_norm_from_samples(&times, &values, f64::INFINITY).unwrap(), 2f64.sqrt());
    assert!(spacetime_norm_from_samples(&[0.0, 0.0], &[1.0, 1.0], 2.0).is_err());
}

fn linear_run(grid: Grid, dt: f64, t_end: f64, sample_every: usize) -> Trajectory {
    let cfg = SolverConfig { nonlinear: false, store_fields: true, sample_every, ..SolverConfig::new(3.0, dt, t_end) };
    evolve(&bumps(grid, 1), &cfg, &PARAMS, &[]).unwrap()
}

#[test]
fn free_flow_has_zero_scattering_residual() {
    let traj = linear_run(Grid::new(1, 128, 30.0).unwrap(), 1e-2, 1.0, 10);
    let r = scattering_residual(&traj, 1.5, 0.2, 1.0).unwrap();
    assert!(r < 1e-12, "{r}");
    assert!(scattering_residual(&traj, 1.5, 0.25, 1.0).is_err());
}

#[test]
fn spacetime_l2_norm_of_free_flow_is_mass_times_length() {
    let traj = linear_run(Grid::new(1, 128, 30.0).unwrap(), 1e-2, 1.0, 5);
    let m = traj.rows[0].mass;
    let got = spacetime_norm(&traj, 2.0, 2.0).unwrap();
    assert!((got - m.sqrt()).abs() <= 1e-10 * m.sqrt());
}

#[test]
fn time_quadrature_converges_with_cadence() {
    let grid = Grid::new(1, 128, 30.0).unwrap();
    let cfg = |every| SolverConfig { store_fields: true, sample_every: every, ..SolverConfig::new(3.0, 1e-3, 0.4) };
    let norms: Vec<f64> = [40, 20, 10, 5]
        .iter()
        .map(|&e| {
            let traj = evolve(&bumps(grid, 2).scale(3.0).unwrap(), &cfg(e), &PARAMS, &[]).unwrap();
            spacetime_norm(&traj, 4.0, 6.0).unwrap()
        })
        .collect();
    let diffs: Vec<f64> = norms.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    assert!(diffs.windows(2).all(|w| w[1] < w[0]), "{norms:?}");
}

#[test]
fn default_family_is_admissible_and_z_norm_is_monotone_in_family() {
    for d in [1, 5, 7] {
        let family = default_pair_family(d);
        assert!(!family.is_empty());
        assert!(family.iter().all(|&(p, q)| admissibility(p, q, d).biharmonic_admissible));
    }
    let traj = linear_run(Grid::new(1, 128, 30.0).unwrap(), 1e-2, 0.5, 5);
    let family = default_pair_family(1);
    let all = z_i_norm(&traj, 4.0, 1.5, &family).unwrap();
    for pair in &family {
        assert!(z_i_norm(&traj, 4.0, 1.5, std::slice::from_ref(pair)).unwrap() <= all);
    }
}

#[test]
fn interpolation_ratio_is_bounded_on_small_data() {
    let grid = Grid::new(1, 128, 30.0).unwrap();
    for seed in 0..6 {
        let u0 = bumps(grid, seed).scale(0.2).unwrap();
        let cfg = SolverConfig { store_fields: true, sample_every: 10, ..SolverConfig::new(3.0, 1e-3, 1.0) };
        let traj = evolve(&u0, &cfg, &PARAMS, &[]).unwrap();
        let r = interpolation_ratio(&traj, 0.5, 5).unwrap();
        assert!(r.is_finite() && r > 0.0 && r <= 10.0, "seed {seed}: {r}");
    }
}

#[test]
fn z_norm_matches_golden_value() {
    let golden: f64 = include_str!("golden/z_i_reference.txt").trim().parse().unwrap();
    let traj = linear_run(Grid::new(1, 128, 30.0).unwrap(), 1e-2, 0.5, 5);
    let got = z_i_norm(&traj, 4.0, 1.5, &default_pair_family(1)).unwrap();
    assert!((got - golden).abs() <= 1e-10 * golden, "{got} vs {golden}");
}
