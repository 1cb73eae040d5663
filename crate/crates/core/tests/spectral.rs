use bihnls::spectral::{
    apply_multiplier, fft, lp_project, max_resolvable_dyadic, Field, Grid, LpKind, MultiplierSpec,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn field_from(grid: Grid, raw: &[(f64, f64)]) -> Field {
    Field::new(grid, raw.iter().map(|&(a, b)| Complex64::new(a, b)).collect()).unwrap()
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Plain `O(n²)` DFT, normalized like the library's forward transform.
fn naive_dft(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let scale = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|k| {
            values
                .iter()
                .enumerate()
                .map(|(j, v)| v * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64))
                .sum::<Complex64>()
                * scale
        })
        .collect()
}

#[test]
fn forward_matches_a_direct_dft() {
    let grid = Grid::new(1, 64, 5.0).unwrap();
    let values: Vec<Complex64> = (0..64).map(|j| Complex64::new((j as f64 * 0.37).sin(), (j as f64).cos() * 0.2)).collect();
    let mut fast = values.clone();
    fft::forward(&grid, &mut fast);
    assert!(max_diff(&fast, &naive_dft(&values)) < 1e-12);
}

#[test]
fn round_trip_in_one_and_five_dimensions() {
    for (dim, n) in [(1, 256), (5, 16)] {
        let grid = Grid::new(dim, n, 3.0).unwrap();
        let values: Vec<Complex64> =
            (0..grid.len()).map(|i| Complex64::new(((i * 7919) % 101) as f64 / 101.0 - 0.5, ((i * 31) % 17) as f64 / 17.0)).collect();
        let mut data = values.clone();
        fft::forward(&grid, &mut data);
        fft::inverse(&grid, &mut data);
        let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(max_diff(&data, &values) <= 1e-12 * scale, "dim {dim}");
    }
}

#[test]
fn lp_pieces_telescope() {
    let grid = Grid::new(1, 512, 2.0 * std::f64::consts::PI).unwrap();
    let f = Field::from_fn(grid, |x| Complex64::new((3.0 * x[0]).sin() + 0.1 * (150.0 * x[0]).cos(), (x[0]).cos())).unwrap();
    let top = max_resolvable_dyadic(&grid);
    let mut sum = lp_project(&f, 1.0, LpKind::Low).unwrap();
    let mut m = 2.0;
    while m <= top {
        sum = sum.add(&lp_project(&f, m, LpKind::Band).unwrap()).unwrap();
        m *= 2.0;
    }
    sum = sum.add(&lp_project(&f, top, LpKind::High).unwrap()).unwrap();
    assert!(sum.sub(&f).unwrap().l2_norm() <= 1e-12 * f.l2_norm());
}

#[test]
fn non_dyadic_and_unresolvable_scales_are_rejected() {
    let grid = Grid::new(1, 64, 2.0 * std::f64::consts::PI).unwrap();
    let f = Field::zeros(grid);
    assert!(lp_project(&f, 3.0, LpKind::Band).is_err());
    assert!(lp_project(&f, 64.0, LpKind::Band).is_err());
    assert!(lp_project(&f, 0.5, LpKind::Low).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn parseval_holds(raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 64), ell in 0.5f64..50.0) {
        let grid = Grid::new(1, 64, ell).unwrap();
        let f = field_from(grid, &raw);
        let a = f.l2_norm();
        let b = f.spectrum().l2_norm();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
    }

    #[test]
    fn multipliers_compose(raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 64), s in -1.0f64..2.0, t in -1.0f64..1.0) {
        let grid = Grid::new(1, 64, 7.0).unwrap();
        let f = field_from(grid, &raw);
        let a = MultiplierSpec::Bracket { s };
        let b = MultiplierSpec::BiharmonicPhase { t };
        let ab = apply_multiplier(&apply_multiplier(&f, &a).unwrap(), &b).unwrap();
        let ba = apply_multiplier(&apply_multiplier(&f, &b).unwrap(), &a).unwrap();
        prop_assert!(ab.sub(&ba).unwrap().l2_norm() <= 1e-12 * ab.l2_norm().max(1e-300));
    }

    #[test]
    fn bernstein_on_random_band_pieces(raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 256), s in 0.25f64..2.0) {
        let grid = Grid::new(1, 256, 2.0 * std::f64::consts::PI).unwrap();
        let f = field_from(grid, &raw);
        let mut m = 2.0;
        while m <= max_resolvable_dyadic(&grid) / 2.0 {
            let piece = lp_project(&f, m, LpKind::Band).unwrap();
            let base = piece.l2_norm();
            if base > 0.0 {
                let lifted = apply_multiplier(&piece, &MultiplierSpec::Fractional { s }).unwrap().l2_norm();
                let r = lifted / (m.powf(s) * base);
                prop_assert!(r >= 2f64.powf(-s) * (1.0 - 1e-12) && r <= 2f64.powf(s) * (1.0 + 1e-12), "m {} ratio {}", m, r);
            }
            m *= 2.0;
        }
    }
}
