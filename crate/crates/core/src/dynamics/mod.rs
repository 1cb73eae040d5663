//! Strang-split time stepping for `i u_t + Δ²u = -|u|^{ν-1} u`, the free
//! biharmonic propagator, and the scaling transform.

mod snapshot;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{rows_to_csv, sobolev_norm, DiagnosticsError, DiagnosticsRow, Observer, RowParams};
use crate::spectral::{fft, Field, Grid, SpectralError};

pub use snapshot::{read_snapshot, write_snapshot};

#[derive(Debug, thiserror::Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed snapshot: {0}")]
    Snapshot(String),
}

fn default_true() -> bool {
    true
}

fn default_ceiling() -> f64 {
    1e6
}

fn default_sample_every() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub nu: f64,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_sample_every")]
    pub sample_every: usize,
    #[serde(default)]
    pub store_fields: bool,
    /// With `false` the nonlinear substep is skipped and the flow is linear.
    #[serde(default = "default_true")]
    pub nonlinear: bool,
    /// The run stops once `‖u‖_{H²}` exceeds this value.
    #[serde(default = "default_ceiling")]
    pub ceiling: f64,
}

impl SolverConfig {
    pub fn new(nu: f64, dt: f64, t_end: f64) -> Self {
        Self { nu, dt, t_end, sample_every: 1, store_fields: false, nonlinear: true, ceiling: default_ceiling() }
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        let bad = |m: String| Err(DynamicsError::Config(m));
        if !(self.nu > 1.0 && self.nu.is_finite()) {
            return bad(format!("nu must exceed 1, got {}", self.nu));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end must be non-negative, got {}", self.t_end));
        }
        if self.sample_every == 0 {
            return bad("sample_every must be at least 1".into());
        }
        if !(self.ceiling > 0.0) {
            return bad(format!("ceiling must be positive, got {}", self.ceiling));
        }
        Ok(())
    }

    /// Number of steps; `dt` is shrunk slightly so that they end exactly at `t_end`.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round().max(if self.t_end > 0.0 { 1.0 } else { 0.0 }) as usize
    }

    pub fn effective_dt(&self) -> f64 {
        match self.steps() {
            0 => self.dt,
            k => self.t_end / k as f64,
        }
    }
}

/// Sampled output of [`evolve`].
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub rows: Vec<DiagnosticsRow>,
    /// Snapshots aligned with `times`; empty unless fields were stored.
    pub fields: Vec<Field>,
    /// The most recent sample, kept even when snapshots are not stored.
    pub last: Option<Field>,
    /// Why the run stopped early, if it did.
    pub aborted: Option<String>,
}

impl Trajectory {
    pub fn is_complete(&self) -> bool {
        self.aborted.is_none()
    }

    pub fn to_csv(&self) -> Result<String, DynamicsError> {
        Ok(rows_to_csv(&self.rows)?)
    }
}

fn biharmonic_phase(grid: &Grid, t: f64) -> Vec<Complex64> {
    grid.radii().into_iter().map(|r| Complex64::from_polar(1.0, t * r.powi(4))).collect()
}

fn rotate(values: &mut [Complex64], t: f64, nu: f64) {
    let e = 0.5 * (nu - 1.0);
    values.par_iter_mut().for_each(|z| {
        let m = z.norm_sqr();
        if m > 0.0 {
            *z *= Complex64::from_polar(1.0, t * m.powf(e));
        }
    });
}

/// `e^{itΔ²} f`: spectral coefficients times `e^{it|ξ|⁴}`.
pub fn free_propagate(f: &Field, t: f64) -> Result<Field, SpectralError> {
    if t == 0.0 {
        return Ok(f.clone());
    }
    let grid = *f.grid();
    let phase = biharmonic_phase(&grid, t);
    let mut v = f.values().to_vec();
    fft::forward(&grid, &mut v);
    v.par_iter_mut().zip(phase.par_iter()).for_each(|(z, p)| *z *= p);
    fft::inverse(&grid, &mut v);
    Field::new(grid, v)
}

/// Exact flow of `u_t = i|u|^{ν-1}u` for time `t`: `u ↦ e^{it|u|^{ν-1}} u`.
pub fn nonlinear_phase(f: &Field, t: f64, nu: f64) -> Result<Field, SpectralError> {
    let mut v = f.values().to_vec();
    rotate(&mut v, t, nu);
    Field::new(*f.grid(), v)
}

/// Half nonlinear step, full free step, half nonlinear step. Negative `dt` runs backwards.
pub fn strang_step(f: &Field, dt: f64, nu: f64) -> Result<Field, SpectralError> {
    let mut s = Stepper::new(*f.grid(), dt, nu, true);
    let mut v = f.values().to_vec();
    s.step(&mut v);
    Field::new(*f.grid(), v)
}

/// Strang stepper with the free-flow phase precomputed.
pub struct Stepper {
    grid: Grid,
    phase: Vec<Complex64>,
    dt: f64,
    nu: f64,
    nonlinear: bool,
}

impl Stepper {
    pub fn new(grid: Grid, dt: f64, nu: f64, nonlinear: bool) -> Self {
        Self { grid, phase: biharmonic_phase(&grid, dt), dt, nu, nonlinear }
    }

    pub fn step(&mut self, v: &mut [Complex64]) {
        if self.nonlinear {
            rotate(v, 0.5 * self.dt, self.nu);
        }
        fft::forward(&self.grid, v);
        v.par_iter_mut().zip(self.phase.par_iter()).for_each(|(z, p)| *z *= p);
        fft::inverse(&self.grid, v);
        if self.nonlinear {
            rotate(v, 0.5 * self.dt, self.nu);
        }
    }
}

/// Evolves `f0` to `cfg.t_end`, sampling every `cfg.sample_every` steps and at the end.
///
/// Crossing the blow-up ceiling, or losing finiteness, stops the run and returns the
/// samples gathered so far with `aborted` set.
pub fn evolve(
    f0: &Field,
    cfg: &SolverConfig,
    params: &RowParams,
    observers: &[&dyn Observer],
) -> Result<Trajectory, DynamicsError> {
    cfg.validate()?;
    let grid = *f0.grid();
    let steps = cfg.steps();
    let dt = cfg.effective_dt();
    let mut stepper = Stepper::new(grid, dt, cfg.nu, cfg.nonlinear);
    let mut traj = Trajectory { times: Vec::new(), rows: Vec::new(), fields: Vec::new(), last: None, aborted: None };
    let mut v = f0.values().to_vec();

    let record = |k: usize, v: &[Complex64], traj: &mut Trajectory| -> Result<bool, DynamicsError> {
        let t = if k == steps { cfg.t_end } else { k as f64 * dt };
        let f = match Field::new(grid, v.to_vec()) {
            Ok(f) => f,
            Err(SpectralError::NonFinite { .. }) => {
                traj.aborted = Some(format!("non-finite field at t = {t}"));
                return Ok(false);
            }
            Err(e) => return Err(e.into()),
        };
        let h2 = sobolev_norm(&f, 2.0, false);
        if !(h2 <= cfg.ceiling) {
            traj.aborted = Some(format!("H^2 norm {h2:e} exceeds ceiling {:e} at t = {t}", cfg.ceiling));
            return Ok(false);
        }
        traj.rows.push(DiagnosticsRow::evaluate(t, &f, params, observers)?);
        traj.times.push(t);
        if cfg.store_fields {
            traj.fields.push(f.clone());
        }
        traj.last = Some(f);
        Ok(true)
    };

    if !record(0, &v, &mut traj)? {
        return Ok(traj);
    }
    for k in 1..=steps {
        stepper.step(&mut v);
        if (k % cfg.sample_every == 0 || k == steps) && !record(k, &v, &mut traj)? {
            break;
        }
    }
    Ok(traj)
}

/// `u_λ(x) = λ^{-4/(ν-1)} u(x/λ)`, realized on the box of side `λ·ell`.
pub fn rescale(f: &Field, lambda: f64, nu: f64) -> Result<Field, DynamicsError> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(DynamicsError::Config(format!("lambda must be positive, got {lambda}")));
    }
    if !(nu > 1.0) {
        return Err(DynamicsError::Config(format!("nu must exceed 1, got {nu}")));
    }
    let grid = f.grid().scaled(lambda)?;
    Ok(f.scale(lambda.powf(-4.0 / (nu - 1.0)))?.with_grid(grid)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::{energy, mass};
    use crate::spectral::{apply_multiplier, MultiplierSpec};
    use std::f64::consts::PI;

    fn bump(g: Grid) -> Field {
        let l = g.ell();
        Field::from_fn(g, |x| {
            let r2: f64 = x.iter().map(|xi| (xi - 0.5 * l).powi(2)).sum();
            Complex64::new((-r2).exp(), 0.3 * (-2.0 * r2).exp())
        })
        .unwrap()
    }

    fn params(nu: f64) -> RowParams {
        RowParams { nu, gamma: 1.5, cutoff: 4.0, sigma: 0.5 }
    }

    fn max_diff(a: &Field, b: &Field) -> f64 {
        a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn free_flow_on_a_mode() {
        let g = Grid::new(1, 32, 2.0 * PI).unwrap();
        let f = Field::plane_wave(g, &[3], Complex64::new(1.0, 0.0));
        let t = 0.013;
        let got = free_propagate(&f, t).unwrap();
        let want = Field::plane_wave(g, &[3], Complex64::from_polar(1.0, 81.0 * t));
        assert!(max_diff(&got, &want) < 1e-12);
        assert_eq!(free_propagate(&f, 0.0).unwrap(), f);
    }

    #[test]
    fn phase_on_constant() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        let c = Complex64::new(0.6, 0.8) * 2.0;
        let f = Field::new(g, vec![c; g.len()]).unwrap();
        let got = nonlinear_phase(&f, 0.1, 3.0).unwrap();
        let want = c * Complex64::from_polar(1.0, 0.1 * 4.0);
        assert!(got.values().iter().all(|z| (z - want).norm() < 1e-14));
        assert_eq!(nonlinear_phase(&f, 0.0, 3.0).unwrap(), f);
    }

    #[test]
    fn strang_keeps_mass_and_reverses() {
        let g = Grid::new(1, 128, 20.0).unwrap();
        let f = bump(g);
        let m0 = mass(&f);
        let mut u = f.clone();
        for _ in 0..50 {
            u = strang_step(&u, 1e-3, 3.0).unwrap();
        }
        assert!((mass(&u) - m0).abs() < 1e-13 * m0);
        for _ in 0..50 {
            u = strang_step(&u, -1e-3, 3.0).unwrap();
        }
        assert!(max_diff(&u, &f) < 1e-10);
        assert_eq!(strang_step(&Field::zeros(g), 0.1, 3.0).unwrap(), Field::zeros(g));
    }

    #[test]
    fn free_flow_commutes_with_multipliers() {
        let g = Grid::new(2, 16, 6.0).unwrap();
        let f = bump(g);
        for m in [
            MultiplierSpec::Fractional { s: 0.7 },
            MultiplierSpec::ISmoothing { cutoff: 2.0, gamma: 1.3 },
            MultiplierSpec::LpBand { m: 2.0 },
        ] {
            let a = apply_multiplier(&free_propagate(&f, 0.02).unwrap(), &m).unwrap();
            let b = free_propagate(&apply_multiplier(&f, &m).unwrap(), 0.02).unwrap();
            assert!(max_diff(&a, &b) < 1e-12);
        }
    }

    #[test]
    fn zero_length_run_has_one_sample() {
        let g = Grid::new(1, 32, 10.0).unwrap();
        let cfg = SolverConfig::new(3.0, 1e-3, 0.0);
        let tr = evolve(&bump(g), &cfg, &params(3.0), &[]).unwrap();
        assert_eq!(tr.times, vec![0.0]);
        assert!(tr.is_complete());
    }

    #[test]
    fn sampling_cadence_and_final_time() {
        let g = Grid::new(1, 32, 10.0).unwrap();
        let cfg = SolverConfig { sample_every: 4, store_fields: true, ..SolverConfig::new(3.0, 0.01, 0.1) };
        let tr = evolve(&bump(g), &cfg, &params(3.0), &[]).unwrap();
        assert_eq!(tr.times.len(), 4);
        assert_eq!(*tr.times.last().unwrap(), 0.1);
        assert_eq!(tr.fields.len(), tr.times.len());
        assert!(tr.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn ceiling_stops_the_run() {
        let g = Grid::new(1, 32, 10.0).unwrap();
        let cfg = SolverConfig { ceiling: 1e-3, ..SolverConfig::new(3.0, 0.01, 0.1) };
        let tr = evolve(&bump(g), &cfg, &params(3.0), &[]).unwrap();
        assert!(!tr.is_complete());
        assert!(tr.times.is_empty());
    }

    #[test]
    fn energy_error_is_second_order() {
        let g = Grid::new(1, 256, 30.0).unwrap();
        let f = bump(g).scale(1.5).unwrap();
        let e0 = energy(&f, 3.0);
        let drift = |dt: f64| {
            let tr = evolve(&f, &SolverConfig::new(3.0, dt, 0.2), &params(3.0), &[]).unwrap();
            tr.rows.iter().map(|r| (r.energy - e0).abs()).fold(0.0, f64::max)
        };
        let ratio = drift(2e-3) / drift(1e-3);
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn scaling_identities() {
        let g = Grid::new(2, 16, 8.0).unwrap();
        let f = bump(g);
        let (nu, lambda) = (3.0, 1.7);
        let gc = 2.0 / 2.0 - 4.0 / (nu - 1.0);
        let u = rescale(&f, lambda, nu).unwrap();
        assert!((mass(&u) / mass(&f) - lambda.powf(2.0 * gc)).abs() < 1e-12 * lambda.powf(2.0 * gc));
        let s = 1.2;
        let r = sobolev_norm(&u, s, true) / sobolev_norm(&f, s, true);
        assert!((r / lambda.powf(gc - s) - 1.0).abs() < 1e-12);
        assert_eq!(rescale(&f, 1.0, nu).unwrap(), f);
    }
}
