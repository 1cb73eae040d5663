//! Functionals of fields and trajectories: conserved quantities, Sobolev and
//! Lebesgue norms, mixed space-time norms, and the scattering residual.

mod observer;
mod spacetime;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::spectral::{Field, MultiplierSpec, SpectralError, Spectrum};

pub use observer::{FnObserver, LebesgueObserver, ModifiedEnergyObserver, Observer};
pub use spacetime::{
    default_pair_family, interpolation_bound, interpolation_ratio, m_sigma_norm, morawetz_norm, scattering_residual,
    scattering_residual_fields, spacetime_norm, spacetime_norm_from_samples, z_i_norm,
};

#[derive(Debug, thiserror::Error)]
pub enum DiagnosticsError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Exponent(#[from] crate::exponents::ExponentError),
    #[error("trajectory has no stored fields")]
    NoSnapshots,
    #[error("no stored sample at t = {0}")]
    MissingTime(f64),
    #[error("invalid exponent {0}")]
    BadExponent(f64),
    #[error("{0}")]
    Invalid(String),
}

/// `‖f‖²_{L²}` by grid quadrature.
pub fn mass(f: &Field) -> f64 {
    f.values().iter().map(|z| z.norm_sqr()).sum::<f64>() * f.grid().cell_volume()
}

fn potential(f: &Field, nu: f64) -> f64 {
    let p = nu + 1.0;
    f.values().iter().map(|z| z.norm().powf(p)).sum::<f64>() * f.grid().cell_volume() / p
}

fn kinetic(s: &Spectrum) -> f64 {
    0.5 * s.weighted_norm(|r| r.powi(4)).powi(2)
}

/// `E(u) = ∫ ½|Δu|² + |u|^{ν+1}/(ν+1)`, with the Laplacian taken spectrally.
pub fn energy(f: &Field, nu: f64) -> f64 {
    kinetic(&f.spectrum()) + potential(f, nu)
}

/// `E(I_N u)`; equal to `energy` when every active mode has `|ξ| ≤ N`.
pub fn modified_energy(f: &Field, nu: f64, cutoff: f64, gamma: f64) -> Result<f64, DiagnosticsError> {
    modified_energy_from_spectrum(&f.spectrum(), nu, cutoff, gamma)
}

pub(crate) fn modified_energy_from_spectrum(
    s: &Spectrum,
    nu: f64,
    cutoff: f64,
    gamma: f64,
) -> Result<f64, DiagnosticsError> {
    let spec = MultiplierSpec::ISmoothing { cutoff, gamma };
    spec.validate()?;
    let smoothed = s.multiply_radial(|r| spec.symbol(r))?;
    Ok(kinetic(&smoothed) + potential(&smoothed.to_field()?, nu))
}

/// Quadratic part `½‖I_N u‖²_{Ḣ²}` of the modified energy.
pub fn modified_kinetic(f: &Field, cutoff: f64, gamma: f64) -> Result<f64, DiagnosticsError> {
    let spec = MultiplierSpec::ISmoothing { cutoff, gamma };
    spec.validate()?;
    Ok(kinetic(&f.spectrum().multiply_radial(|r| spec.symbol(r))?))
}

fn sobolev_weight(s: f64, homogeneous: bool) -> impl Fn(f64) -> f64 {
    move |r: f64| {
        if homogeneous {
            if s == 0.0 {
                1.0
            } else if r == 0.0 {
                0.0
            } else {
                r.powf(2.0 * s)
            }
        } else {
            (1.0 + r * r).powf(s)
        }
    }
}

pub(crate) fn sobolev_from_spectrum(sp: &Spectrum, s: f64, homogeneous: bool) -> f64 {
    sp.weighted_norm(sobolev_weight(s, homogeneous))
}

/// `‖f‖_{Ḣ^s}` (symbol `|ξ|^s`) or `‖f‖_{H^s}` (symbol `(1+|ξ|²)^{s/2}`).
pub fn sobolev_norm(f: &Field, s: f64, homogeneous: bool) -> f64 {
    sobolev_from_spectrum(&f.spectrum(), s, homogeneous)
}

/// `‖f‖_{L^q}` by quadrature; `q = ∞` is the maximum modulus.
pub fn lebesgue_norm(f: &Field, q: f64) -> Result<f64, DiagnosticsError> {
    if !(q >= 1.0) {
        return Err(DiagnosticsError::BadExponent(q));
    }
    if q.is_infinite() {
        return Ok(f.values().iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    let sum: f64 = f.values().iter().map(|z| z.norm().powf(q)).sum();
    Ok((sum * f.grid().cell_volume()).powf(1.0 / q))
}

/// Parameters of the standard diagnostics row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RowParams {
    pub nu: f64,
    pub gamma: f64,
    /// Cutoff `N` of the smoothing operator in the `modified_energy` column.
    pub cutoff: f64,
    pub sigma: f64,
}

/// One sampled time of a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub modified_energy: f64,
    pub h_gamma: f64,
    pub hdot_half: f64,
    pub hdot_sigma: f64,
    pub l_nu1: f64,
    pub extras: Vec<(String, f64)>,
}

pub const ROW_COLUMNS: [&str; 8] =
    ["t", "mass", "energy", "modified_energy", "h_gamma", "hdot_half", "hdot_sigma", "l_nu1"];

impl DiagnosticsRow {
    pub fn evaluate(
        t: f64,
        f: &Field,
        params: &RowParams,
        observers: &[&dyn Observer],
    ) -> Result<Self, DiagnosticsError> {
        let sp = f.spectrum();
        let energy = kinetic(&sp) + potential(f, params.nu);
        let extras = observers
            .iter()
            .map(|o| Ok((o.name(), o.observe(t, f, &sp)?)))
            .collect::<Result<Vec<_>, DiagnosticsError>>()?;
        Ok(Self {
            t,
            mass: mass(f),
            energy,
            modified_energy: modified_energy_from_spectrum(&sp, params.nu, params.cutoff, params.gamma)?,
            h_gamma: sobolev_from_spectrum(&sp, params.gamma, false),
            hdot_half: sobolev_from_spectrum(&sp, 0.5, true),
            hdot_sigma: sobolev_from_spectrum(&sp, params.sigma, true),
            l_nu1: lebesgue_norm(f, params.nu + 1.0)?,
            extras,
        })
    }

    pub fn extra(&self, name: &str) -> Option<f64> {
        self.extras.iter().find(|(k, _)| k == name).map(|&(_, v)| v)
    }

    fn is_finite(&self) -> bool {
        [self.t, self.mass, self.energy, self.modified_energy, self.h_gamma, self.hdot_half, self.hdot_sigma, self.l_nu1]
            .iter()
            .chain(self.extras.iter().map(|(_, v)| v))
            .all(|v| v.is_finite())
    }
}

/// Renders rows as CSV: fixed columns, then the extras of the first row.
pub fn rows_to_csv(rows: &[DiagnosticsRow]) -> Result<String, DiagnosticsError> {
    let extra_names: Vec<&str> = rows.first().map(|r| r.extras.iter().map(|(k, _)| k.as_str()).collect()).unwrap_or_default();
    let mut out = ROW_COLUMNS.join(",");
    for name in &extra_names {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for row in rows {
        if !row.is_finite() {
            return Err(DiagnosticsError::Invalid(format!("non-finite diagnostics at t = {}", row.t)));
        }
        let names: Vec<&str> = row.extras.iter().map(|(k, _)| k.as_str()).collect();
        if names != extra_names {
            return Err(DiagnosticsError::Invalid("rows carry different extra columns".into()));
        }
        write!(
            out,
            "{},{},{},{},{},{},{},{}",
            row.t, row.mass, row.energy, row.modified_energy, row.h_gamma, row.hdot_half, row.hdot_sigma, row.l_nu1
        )
        .expect("writing to a String cannot fail");
        for (_, v) in &row.extras {
            write!(out, ",{v}").expect("writing to a String cannot fail");
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_field_has_nothing() {
        let g = Grid::new(2, 8, 3.0).unwrap();
        let z = Field::zeros(g);
        assert_eq!(mass(&z), 0.0);
        assert_eq!(energy(&z, 3.0), 0.0);
    }

    #[test]
    fn constant_field() {
        let g = Grid::new(2, 8, 3.0).unwrap();
        let amp = c(0.6, -0.8) * 1.5;
        let f = Field::new(g, vec![amp; g.len()]).unwrap();
        let v = g.volume();
        assert!((mass(&f) - amp.norm_sqr() * v).abs() < 1e-12);
        for nu in [2.0, 3.0, 4.5] {
            let want = v * amp.norm().powf(nu + 1.0) / (nu + 1.0);
            assert!((energy(&f, nu) - want).abs() < 1e-11 * want);
        }
    }

    #[test]
    fn plane_wave_energy() {
        let g = Grid::new(1, 32, 2.0 * PI).unwrap();
        let f = Field::plane_wave(g, &[3], c(1.0, 0.0));
        let v = g.volume();
        let want = v * (0.5 * 81.0 + 1.0 / 4.0);
        assert!((energy(&f, 3.0) - want).abs() < 1e-10);
        assert!((sobolev_norm(&f, 1.5, true) - 3f64.powf(1.5) * v.sqrt()).abs() < 1e-11);
        assert!((sobolev_norm(&f, 0.0, true) - lebesgue_norm(&f, 2.0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn modified_energy_on_low_and_high_modes() {
        let g = Grid::new(1, 64, 2.0 * PI).unwrap();
        let low = Field::plane_wave(g, &[4], c(0.3, 0.1));
        let e = energy(&low, 3.0);
        assert!((modified_energy(&low, 3.0, 4.0, 1.2).unwrap() - e).abs() < 1e-12 * e);
        assert!((modified_energy(&low, 3.0, g.max_radius(), 1.2).unwrap() - e).abs() < 1e-12 * e);

        let n = 4.0;
        let high = Field::plane_wave(g, &[16], c(1.0, 0.0));
        let gamma = 1.5;
        let full = 0.5 * sobolev_norm(&high, 2.0, true).powi(2);
        let damped = modified_kinetic(&high, n, gamma).unwrap();
        assert!((damped - full * 4f64.powf(gamma - 2.0).powi(2)).abs() < 1e-10 * full);
    }

    #[test]
    fn csv_has_fixed_header() {
        let g = Grid::new(1, 8, 1.0).unwrap();
        let f = Field::plane_wave(g, &[1], c(1.0, 0.0));
        let p = RowParams { nu: 3.0, gamma: 1.5, cutoff: 2.0, sigma: 0.5 };
        let obs = FnObserver::new("twice_mass", |_, f, _| Ok(2.0 * mass(f)));
        let row = DiagnosticsRow::evaluate(0.0, &f, &p, &[&obs]).unwrap();
        let csv = rows_to_csv(&[row]).unwrap();
        assert!(csv.starts_with("t,mass,energy,modified_energy,h_gamma,hdot_half,hdot_sigma,l_nu1,twice_mass\n"));
        assert_eq!(csv.lines().count(), 2);
    }
}
