use crate::spectral::{Field, MultiplierSpec, Spectrum};

use super::{lebesgue_norm, modified_energy_from_spectrum, DiagnosticsError};

/// An extra scalar recorded at every sample of an evolution.
pub trait Observer: Sync {
    /// Column name in the diagnostics CSV.
    fn name(&self) -> String;
    fn observe(&self, t: f64, f: &Field, spectrum: &Spectrum) -> Result<f64, DiagnosticsError>;
}

type ObserveFn = dyn Fn(f64, &Field, &Spectrum) -> Result<f64, DiagnosticsError> + Sync;

pub struct FnObserver {
    name: String,
    f: Box<ObserveFn>,
}

impl FnObserver {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(f64, &Field, &Spectrum) -> Result<f64, DiagnosticsError> + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), f: Box::new(f) }
    }
}

impl Observer for FnObserver {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn observe(&self, t: f64, f: &Field, spectrum: &Spectrum) -> Result<f64, DiagnosticsError> {
        (self.f)(t, f, spectrum)
    }
}

/// `E(I_N u)` for a cutoff other than the one in the fixed columns.
#[derive(Debug, Clone, Copy)]
pub struct ModifiedEnergyObserver {
    pub nu: f64,
    pub cutoff: f64,
    pub gamma: f64,
}

impl Observer for ModifiedEnergyObserver {
    fn name(&self) -> String {
        format!("modified_energy_n{}", self.cutoff)
    }

    fn observe(&self, _t: f64, _f: &Field, spectrum: &Spectrum) -> Result<f64, DiagnosticsError> {
        modified_energy_from_spectrum(spectrum, self.nu, self.cutoff, self.gamma)
    }
}

/// `‖T f‖_{L^q}` where `T` is an optional Fourier multiplier.
#[derive(Debug, Clone)]
pub struct LebesgueObserver {
    pub q: f64,
    pub multiplier: Option<MultiplierSpec>,
}

impl Observer for LebesgueObserver {
    fn name(&self) -> String {
        match &self.multiplier {
            None => format!("l{}", self.q),
            Some(_) => format!("l{}_weighted", self.q),
        }
    }

    fn observe(&self, _t: f64, f: &Field, spectrum: &Spectrum) -> Result<f64, DiagnosticsError> {
        match &self.multiplier {
            None => lebesgue_norm(f, self.q),
            Some(m) => {
                m.validate()?;
                let g = spectrum.multiply_radial(|r| m.symbol(r))?.to_field()?;
                lebesgue_norm(&g, self.q)
            }
        }
    }
}
