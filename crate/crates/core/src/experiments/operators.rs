use std::fmt::Write as _;

use num_complex::Complex64;

use super::{balanced_field, ExperimentConfig, ExperimentError, ExperimentReport, Outcome};
use crate::diagnostics::sobolev_norm;
use crate::spectral::{apply_multiplier, i_symbol_profile, lp_project, max_resolvable_dyadic, Field, Grid, LpKind, MultiplierSpec};

/// Measured range of one property against its declared bounds.
struct Check {
    name: &'static str,
    min: f64,
    max: f64,
    lo: f64,
    hi: f64,
}

impl Check {
    fn new(name: &'static str, values: &[f64], lo: f64, hi: f64) -> Self {
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self { name, min, max, lo, hi }
    }

    fn pass(&self) -> bool {
        self.min.is_finite() && self.max.is_finite() && self.min >= self.lo && self.max <= self.hi
    }
}

fn dyadics(grid: &Grid) -> Vec<f64> {
    let top = max_resolvable_dyadic(grid);
    std::iter::successors(Some(1.0), |m| Some(m * 2.0)).take_while(|&m| m <= top).collect()
}

fn distance(a: &Field, b: &Field) -> Result<f64, ExperimentError> {
    Ok(a.sub(b)?.l2_norm())
}

/// A plane wave whose wave vector has length close to `rho`, along the first axis.
fn mode_near(grid: Grid, rho: f64) -> Option<(Field, f64)> {
    let k = (rho / grid.dk()).round() as i64;
    if k <= 0 || (k as f64) >= grid.n() as f64 / 2.0 {
        return None;
    }
    let mut kv = vec![0; grid.dim()];
    kv[0] = k;
    Some((Field::plane_wave(grid, &kv, Complex64::new(1.0, 0.0)), k as f64 * grid.dk()))
}

/// Littlewood-Paley, Bernstein and smoothing-operator property checks on the configured grid.
pub fn run_operator_suite(cfg: &ExperimentConfig) -> Result<Outcome, ExperimentError> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let gamma = cfg.gamma;
    let f = balanced_field(grid, gamma, cfg.seed)?;
    let scale = f.l2_norm();
    let ms = dyadics(&grid);
    let mut checks = Vec::new();

    let mut partition = Vec::new();
    for &m in &ms {
        let low = lp_project(&f, m, LpKind::Low)?;
        let high = lp_project(&f, m, LpKind::High)?;
        partition.push(distance(&low.add(&high)?, &f)? / scale);
    }
    checks.push(Check::new("lp_partition", &partition, 0.0, 1e-12));

    for (name, s) in [("bernstein_s0.5", 0.5), ("bernstein_s1", 1.0), ("bernstein_s2", 2.0)] {
        let mut ratios = Vec::new();
        for &m in &ms {
            let piece = lp_project(&f, m, LpKind::Band)?;
            let base = lp_project(&piece, m, LpKind::Band)?.l2_norm();
            if base == 0.0 {
                continue;
            }
            let lifted = lp_project(&apply_multiplier(&piece, &MultiplierSpec::Fractional { s })?, m, LpKind::Band)?;
            ratios.push(lifted.l2_norm() / (m.powf(s) * base));
        }
        checks.push(Check::new(name, &ratios, 2f64.powf(-s), 2f64.powf(s)));
    }

    let mut plateau = Vec::new();
    let mut tail = Vec::new();
    for &n in &cfg.n_list {
        let smoothing = MultiplierSpec::ISmoothing { cutoff: n, gamma };
        if let Some((wave, _)) = mode_near(grid, 0.5 * n) {
            plateau.push(distance(&apply_multiplier(&wave, &smoothing)?, &wave)? / wave.l2_norm());
        }
        for factor in [2.0, 4.0] {
            if let Some((wave, rho)) = mode_near(grid, factor * n) {
                if rho >= 2.0 * n {
                    let want = wave.scale((rho / n).powf(gamma - 2.0))?;
                    tail.push(distance(&apply_multiplier(&wave, &smoothing)?, &want)? / wave.l2_norm());
                }
            }
        }
    }
    checks.push(Check::new("i_plateau", &plateau, 0.0, 1e-12));
    checks.push(Check::new("i_tail", &tail, 0.0, 1e-12));

    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let hg = sobolev_norm(&f, gamma, false);
    for &n in &cfg.n_list {
        let ih2 = sobolev_norm(&apply_multiplier(&f, &MultiplierSpec::ISmoothing { cutoff: n, gamma })?, 2.0, false);
        lower.push(hg / ih2);
        upper.push(ih2 / (n.powf(2.0 - gamma) * hg));
    }
    let spread = |v: &[f64]| {
        let c = Check::new("", v, 0.0, 0.0);
        c.max / c.min
    };
    checks.push(Check::new("sandwich_lower_spread", &[spread(&lower)], 1.0, 4.0));
    checks.push(Check::new("sandwich_upper_spread", &[spread(&upper)], 1.0, 4.0));

    let mut steps = Vec::new();
    for &n in &cfg.n_list {
        let samples: Vec<f64> = (0..=4000)
            .map(|i| i_symbol_profile(4.0 * n * i as f64 / 4000.0, n, gamma))
            .collect::<Result<_, _>>()?;
        steps.extend(samples.windows(2).map(|w| w[1] - w[0]));
    }
    checks.push(Check::new("i_symbol_non_increasing", &steps, f64::NEG_INFINITY, 0.0));

    let mut report = ExperimentReport::new("operators", cfg);
    let mut csv = String::from("property,measured_min,measured_max,bound_lo,bound_hi,pass\n");
    for c in &checks {
        report.verdict(c.name, c.pass());
        writeln!(csv, "{},{},{},{},{},{}", c.name, c.min, c.max, c.lo, c.hi, c.pass()).expect("writing to a String cannot fail");
    }
    report.metric("dyadic_m", ms);
    report.metric("sandwich_lower", lower);
    report.metric("sandwich_upper", upper);
    Ok(Outcome { report, files: vec![("operators.csv".into(), csv)] })
}
