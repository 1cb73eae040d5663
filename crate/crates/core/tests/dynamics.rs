use bihnls::diagnostics::{mass, sobolev_norm, RowParams};
use bihnls::dynamics::{evolve, free_propagate, read_snapshot, rescale, strang_step, write_snapshot, SolverConfig};
use bihnls::experiments::{gaussian_bumps, InitialData};
use bihnls::spectral::{apply_multiplier, Field, Grid, MultiplierSpec};
use num_complex::Complex64;
use proptest::prelude::*;

const PARAMS: RowParams = RowParams { nu: 3.0, gamma: 1.5, cutoff: 4.0, sigma: 0.5 };

fn datum(grid: Grid, seed: u64, norm: f64) -> Field {
    let init = InitialData { bumps: 3, width_min: 0.6, width_max: 1.2, norm, ..InitialData::default() };
    gaussian_bumps(grid, &init, 1.5, seed).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn mass_is_conserved_over_a_thousand_steps() {
    let grid = Grid::new(1, 256, 30.0).unwrap();
    let cfg = SolverConfig { sample_every: 100, ..SolverConfig::new(3.0, 1e-3, 1.0) };
    let traj = evolve(&datum(grid, 4, 2.0), &cfg, &PARAMS, &[]).unwrap();
    assert_eq!(cfg.steps(), 1000);
    let m0 = traj.rows[0].mass;
    assert!(traj.rows.iter().all(|r| rel(r.mass, m0) < 1e-10));
}

#[test]
fn mass_is_conserved_in_five_dimensions() {
    let grid = Grid::new(5, 16, 2.0 * std::f64::consts::PI).unwrap();
    let cfg = SolverConfig { sample_every: 20, ..SolverConfig::new(3.0, 1e-4, 2e-3) };
    let traj = evolve(&datum(grid, 0, 1.0), &cfg, &PARAMS, &[]).unwrap();
    let m0 = traj.rows[0].mass;
    assert!(traj.is_complete());
    assert!(traj.rows.iter().all(|r| rel(r.mass, m0) < 1e-10));
}

#[test]
fn strang_step_is_time_reversible() {
    let grid = Grid::new(1, 128, 20.0).unwrap();
    let u = datum(grid, 9, 3.0);
    let mut v = u.clone();
    for _ in 0..50 {
        v = strang_step(&v, 2e-3, 5.0).unwrap();
    }
    for _ in 0..50 {
        v = strang_step(&v, -2e-3, 5.0).unwrap();
    }
    assert!(v.sub(&u).unwrap().l2_norm() <= 1e-12 * u.l2_norm());
}

#[test]
fn linear_flow_conserves_every_sobolev_norm() {
    let grid = Grid::new(1, 128, 20.0).unwrap();
    let u = datum(grid, 2, 1.0);
    let v = free_propagate(&u, 0.73).unwrap();
    for s in [0.0, 0.5, 1.5, 2.0] {
        assert!(rel(sobolev_norm(&v, s, true), sobolev_norm(&u, s, true)) < 1e-12);
    }
}

#[test]
fn snapshot_round_trips_through_bytes() {
    let grid = Grid::new(2, 16, 5.0).unwrap();
    let u = datum(grid, 1, 1.0);
    let mut bytes = Vec::new();
    write_snapshot(&mut bytes, &u, 0.125).unwrap();
    let (v, t) = read_snapshot(bytes.as_slice()).unwrap();
    assert_eq!(t, 0.125);
    assert_eq!(v, u);
    assert!(read_snapshot(&bytes[..bytes.len() - 1]).is_err());
}

#[test]
fn rescaling_follows_the_critical_exponent() {
    let grid = Grid::new(1, 128, 20.0).unwrap();
    let u = datum(grid, 3, 1.0);
    for (nu, lambda) in [(3.0, 2.0), (5.0, 0.5), (9.0, 3.7)] {
        let gc = 0.5 - 4.0 / (nu - 1.0);
        let v = rescale(&u, lambda, nu).unwrap();
        assert!(rel(mass(&v), lambda.powf(2.0 * gc) * mass(&u)) < 1e-12);
        assert!(rel(sobolev_norm(&v, 1.2, true), lambda.powf(gc - 1.2) * sobolev_norm(&u, 1.2, true)) < 1e-12);
    }
    assert!(rescale(&u, 0.0, 3.0).is_err());
}

fn any_multiplier() -> impl Strategy<Value = MultiplierSpec> {
    prop_oneof![
        (-1.0f64..2.0).prop_map(|s| MultiplierSpec::Fractional { s }),
        (-2.0f64..2.0).prop_map(|s| MultiplierSpec::Bracket { s }),
        (0u32..4).prop_map(|e| MultiplierSpec::LpLow { m: 2f64.powi(e as i32) }),
        (0u32..4).prop_map(|e| MultiplierSpec::LpHigh { m: 2f64.powi(e as i32) }),
        (0u32..4).prop_map(|e| MultiplierSpec::LpBand { m: 2f64.powi(e as i32) }),
        (0.5f64..8.0, 0.0f64..1.99).prop_map(|(cutoff, gamma)| MultiplierSpec::ISmoothing { cutoff, gamma }),
        (5u32..12).prop_map(|d| MultiplierSpec::MorawetzWeight { d }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn free_flow_commutes_with_radial_multipliers(
        raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 64),
        m in any_multiplier(),
        t in -2.0f64..2.0,
    ) {
        let grid = Grid::new(1, 64, 9.0).unwrap();
        let u = Field::new(grid, raw.iter().map(|&(a, b)| Complex64::new(a, b)).collect()).unwrap();
        let a = apply_multiplier(&free_propagate(&u, t).unwrap(), &m).unwrap();
        let b = free_propagate(&apply_multiplier(&u, &m).unwrap(), t).unwrap();
        prop_assert!(a.sub(&b).unwrap().l2_norm() <= 1e-12 * a.l2_norm().max(1.0));
    }

    #[test]
    fn strang_preserves_mass_for_any_nonlinearity(seed in 0u64..500, nu in 1.5f64..9.0, dt in 1e-4f64..1e-2) {
        let grid = Grid::new(1, 64, 15.0).unwrap();
        let u = datum(grid, seed, 2.0);
        let v = strang_step(&strang_step(&u, dt, nu).unwrap(), dt, nu).unwrap();
        prop_assert!(rel(mass(&v), mass(&u)) < 1e-12);
    }
}
