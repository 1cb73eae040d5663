use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::diagnostics::sobolev_norm;
use crate::spectral::{Field, Grid, Spectrum};

/// Seeded superposition of complex Gaussian bumps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialData {
    pub bumps: usize,
    /// Widths are drawn log-uniformly from `[width_min, width_max]`.
    pub width_min: f64,
    pub width_max: f64,
    /// Bump amplitudes scale as `(w / width_max)^profile`; positive values give
    /// a power-law spectrum built from many scales.
    pub profile: f64,
    /// Spectral cutoff `|ξ| ≤ band`; defaults to two thirds of the axis Nyquist radius.
    pub band: Option<f64>,
    /// `H^γ` norm of the datum.
    pub norm: f64,
}

impl Default for InitialData {
    fn default() -> Self {
        Self { bumps: 3, width_min: 0.5, width_max: 1.0, profile: 0.0, band: None, norm: 1.0 }
    }
}

impl InitialData {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: String| Err(ExperimentError::Config(m));
        if self.bumps == 0 {
            return bad("init.bumps must be at least 1".into());
        }
        if !(self.width_min > 0.0 && self.width_max >= self.width_min && self.width_max.is_finite()) {
            return bad(format!("init widths must satisfy 0 < width_min <= width_max, got {} and {}", self.width_min, self.width_max));
        }
        if !self.profile.is_finite() {
            return bad("init.profile must be finite".into());
        }
        if let Some(b) = self.band {
            if !(b > 0.0) {
                return bad(format!("init.band must be positive, got {b}"));
            }
        }
        if !(self.norm >= 0.0 && self.norm.is_finite()) {
            return bad(format!("init.norm must be non-negative, got {}", self.norm));
        }
        Ok(())
    }
}

fn periodic_offset(x: f64, c: f64, ell: f64) -> f64 {
    (x - c + 0.5 * ell).rem_euclid(ell) - 0.5 * ell
}

/// Band-limited bumps normalized to `‖u₀‖_{H^γ} = init.norm`.
pub fn gaussian_bumps(grid: Grid, init: &InitialData, gamma: f64, seed: u64) -> Result<Field, ExperimentError> {
    init.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ell = grid.ell();
    let bumps: Vec<(Vec<f64>, f64, Complex64)> = (0..init.bumps)
        .map(|_| {
            let centre: Vec<f64> = (0..grid.dim()).map(|_| rng.gen::<f64>() * ell).collect();
            let w = init.width_min * (init.width_max / init.width_min).powf(rng.gen::<f64>());
            let amp = (w / init.width_max).powf(init.profile) * (0.5 + 0.5 * rng.gen::<f64>());
            let phase = std::f64::consts::TAU * rng.gen::<f64>();
            (centre, w, Complex64::from_polar(amp, phase))
        })
        .collect();
    let raw = Field::from_fn(grid, |x| {
        bumps
            .iter()
            .map(|(c, w, a)| {
                let r2: f64 = x.iter().zip(c).map(|(&xi, &ci)| periodic_offset(xi, ci, ell).powi(2)).sum();
                a * (-r2 / (2.0 * w * w)).exp()
            })
            .sum()
    })?;
    let band = init.band.unwrap_or(2.0 / 3.0 * grid.axis_nyquist());
    let limited = raw.spectrum().multiply_radial(|r| Complex64::new(if r <= band { 1.0 } else { 0.0 }, 0.0))?.to_field()?;
    normalize(limited, gamma, init.norm)
}

fn normalize(f: Field, gamma: f64, target: f64) -> Result<Field, ExperimentError> {
    let norm = sobolev_norm(&f, gamma, false);
    if target == 0.0 {
        return Ok(Field::zeros(*f.grid()));
    }
    if norm == 0.0 {
        return Err(ExperimentError::Config("initial datum vanishes on this grid; widen init.band".into()));
    }
    Ok(f.scale(target / norm)?)
}

/// Random field whose `H^γ` energy per dyadic shell decays like `ρ^{-(2-γ)+0.2}`,
/// normalized to unit `H^γ` norm. Its smoothed norms `‖I_N f‖_{H²}` grow at
/// roughly half the rate `N^{2-γ}`, which keeps both sandwich ratios flat.
pub fn balanced_field(grid: Grid, gamma: f64, seed: u64) -> Result<Field, ExperimentError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exponent = -(gamma + 2.0 + grid.dim() as f64) + 0.2;
    let dk = grid.dk();
    let coeffs = grid
        .radii()
        .into_iter()
        .map(|r| {
            let mag = if r == 0.0 { 1.0 } else { (r / dk).powf(0.5 * exponent) };
            let jitter = 0.5 + rng.gen::<f64>();
            Complex64::from_polar(mag * jitter, std::f64::consts::TAU * rng.gen::<f64>())
        })
        .collect();
    normalize(Spectrum::new(grid, coeffs)?.to_field()?, gamma, 1.0)
}
