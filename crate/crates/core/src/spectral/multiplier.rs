//! Radial Fourier multipliers and their symbols.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Field, Grid, SpectralError};

/// A radial Fourier symbol. All kinds except [`MultiplierSpec::BiharmonicPhase`]
/// are real; the phase is unimodular.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MultiplierSpec {
    /// `exp(i t |xi|^4)`, the free biharmonic flow over time `t`.
    BiharmonicPhase { t: f64 },
    /// `|xi|^s`. For `s < 0` the zero mode is set to zero.
    Fractional { s: f64 },
    /// `(1 + |xi|^2)^{s/2}`.
    Bracket { s: f64 },
    LpLow { m: f64 },
    LpHigh { m: f64 },
    LpBand { m: f64 },
    /// The smoothing operator: identity below `cutoff`, `(|xi|/cutoff)^{gamma-2}` above `2 cutoff`.
    ISmoothing { cutoff: f64, gamma: f64 },
    /// `|xi|^{-(d-5)/4}` with the zero mode removed when the power is negative.
    MorawetzWeight { d: u32 },
}

/// Which Littlewood-Paley piece to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpKind {
    Low,
    High,
    Band,
}

/// Clamped cubic smoothstep `3x^2 - 2x^3` on `[0, 1]`.
pub fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * (3.0 - 2.0 * x)
}

/// Radial bump: 1 on `rho <= 1`, 0 on `rho >= 2`, cubic smoothstep in `log2 rho` between.
pub fn lp_bump(rho: f64) -> f64 {
    if rho <= 1.0 {
        1.0
    } else if rho >= 2.0 {
        0.0
    } else {
        1.0 - smoothstep(rho.log2())
    }
}

/// Profile of the smoothing symbol at radius `rho`.
///
/// Equal to 1 for `rho <= cutoff` and to `(rho/cutoff)^{gamma-2}` for `rho >= 2 cutoff`.
/// In between the exponent is blended as `(gamma-2) * s(log2(rho/cutoff))`, which
/// is C1, monotone, and hits both endpoints exactly.
pub fn i_symbol_profile(rho: f64, cutoff: f64, gamma: f64) -> Result<f64, SpectralError> {
    if !(0.0..2.0).contains(&gamma) {
        return Err(SpectralError::GammaRange(gamma));
    }
    if !(cutoff > 0.0 && cutoff.is_finite()) {
        return Err(SpectralError::Cutoff(cutoff));
    }
    if !(rho >= 0.0) {
        return Err(SpectralError::Radius(rho));
    }
    Ok(i_symbol_unchecked(rho, cutoff, gamma))
}

fn i_symbol_unchecked(rho: f64, cutoff: f64, gamma: f64) -> f64 {
    let ratio = rho / cutoff;
    if ratio <= 1.0 {
        1.0
    } else if ratio >= 2.0 {
        ratio.powf(gamma - 2.0)
    } else {
        let u = ratio.log2();
        ratio.powf((gamma - 2.0) * smoothstep(u))
    }
}

/// `rho^s`, with the zero mode zeroed for `s < 0` and kept for `s == 0`.
fn fractional_symbol(rho: f64, s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else if rho == 0.0 {
        0.0
    } else {
        rho.powf(s)
    }
}

pub fn is_dyadic(m: f64) -> bool {
    if !(m > 0.0 && m.is_finite()) {
        return false;
    }
    let e = m.log2();
    (e - e.round()).abs() < 1e-12
}

impl MultiplierSpec {
    pub fn validate(&self) -> Result<(), SpectralError> {
        let finite = |v: f64| -> Result<(), SpectralError> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(SpectralError::Parameter(format!("non-finite multiplier parameter in {self:?}")))
            }
        };
        match *self {
            Self::BiharmonicPhase { t } => finite(t),
            Self::Fractional { s } | Self::Bracket { s } => finite(s),
            Self::LpLow { m } | Self::LpHigh { m } | Self::LpBand { m } => {
                if is_dyadic(m) {
                    Ok(())
                } else {
                    Err(SpectralError::NotDyadic(m))
                }
            }
            Self::ISmoothing { cutoff, gamma } => i_symbol_profile(0.0, cutoff, gamma).map(|_| ()),
            Self::MorawetzWeight { .. } => Ok(()),
        }
    }

    /// Symbol value at radius `rho`. Callers should [`validate`](Self::validate) first.
    pub fn symbol(&self, rho: f64) -> Complex64 {
        let real = |v: f64| Complex64::new(v, 0.0);
        match *self {
            Self::BiharmonicPhase { t } => Complex64::from_polar(1.0, t * rho.powi(4)),
            Self::Fractional { s } => real(fractional_symbol(rho, s)),
            Self::Bracket { s } => real((1.0 + rho * rho).powf(0.5 * s)),
            Self::LpLow { m } => real(lp_bump(rho / m)),
            Self::LpHigh { m } => real(1.0 - lp_bump(rho / m)),
            Self::LpBand { m } => real(lp_bump(rho / m) - lp_bump(2.0 * rho / m)),
            Self::ISmoothing { cutoff, gamma } => real(i_symbol_unchecked(rho, cutoff, gamma)),
            Self::MorawetzWeight { d } => real(fractional_symbol(rho, -(d as f64 - 5.0) / 4.0)),
        }
    }

    pub fn is_real(&self) -> bool {
        !matches!(self, Self::BiharmonicPhase { .. })
    }
}

/// Returns the field whose spectral coefficients are those of `f` times the sampled symbol.
pub fn apply_multiplier(f: &Field, m: &MultiplierSpec) -> Result<Field, SpectralError> {
    m.validate()?;
    f.spectrum().multiply_radial(|r| m.symbol(r))?.to_field()
}

/// Largest dyadic `M` the lattice resolves along one axis.
pub fn max_resolvable_dyadic(grid: &Grid) -> f64 {
    2f64.powi(grid.axis_nyquist().log2().floor() as i32)
}

/// Littlewood-Paley projection `P_{<=M}`, `P_{>M}` or `P_M`.
///
/// `M` must be a power of two with `1 <= M <= (n/2) (2 pi / ell)`.
pub fn lp_project(f: &Field, m: f64, kind: LpKind) -> Result<Field, SpectralError> {
    if !is_dyadic(m) {
        return Err(SpectralError::NotDyadic(m));
    }
    let upper = f.grid().axis_nyquist();
    if m < 1.0 || m > upper * (1.0 + 1e-12) {
        return Err(SpectralError::Unresolvable { m, upper });
    }
    let spec = match kind {
        LpKind::Low => MultiplierSpec::LpLow { m },
        LpKind::High => MultiplierSpec::LpHigh { m },
        LpKind::Band => MultiplierSpec::LpBand { m },
    };
    apply_multiplier(f, &spec)
}

/// Samples a real symbol on `samples` evenly spaced radii in `[0, rho_max]` as CSV
/// with header `rho,value`.
pub fn symbol_csv(m: &MultiplierSpec, rho_max: f64, samples: usize) -> Result<String, SpectralError> {
    m.validate()?;
    if !m.is_real() {
        return Err(SpectralError::Parameter("only real symbols can be exported".into()));
    }
    if samples < 2 || !(rho_max > 0.0 && rho_max.is_finite()) {
        return Err(SpectralError::Parameter("need at least two samples and a positive rho_max".into()));
    }
    let mut out = String::from("rho,value\n");
    for i in 0..samples {
        let rho = rho_max * i as f64 / (samples - 1) as f64;
        writeln!(out, "{},{}", rho, m.symbol(rho).re).expect("writing to a String cannot fail");
    }
    Ok(out)
}
