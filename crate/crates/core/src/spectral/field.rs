use num_complex::Complex64;

use super::{fft, Grid, SpectralError};

/// Complex samples on a [`Grid`], stored in physical space.
///
/// Every entry is finite; constructors reject anything else.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<Complex64>,
}

/// Unitary spectral coefficients of a field, in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

fn check_finite(values: &[Complex64]) -> Result<(), SpectralError> {
    match values.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        Some(index) => Err(SpectralError::NonFinite { index }),
        None => Ok(()),
    }
}

impl Field {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self, SpectralError> {
        if values.len() != grid.len() {
            return Err(SpectralError::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        check_finite(&values)?;
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    /// Samples `f(x)` at every lattice point.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> Complex64) -> Result<Self, SpectralError> {
        let values = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        Self::new(grid, values)
    }

    /// `amplitude * exp(i xi.x)` with `xi = (2 pi / ell) k`.
    pub fn plane_wave(grid: Grid, k: &[i64], amplitude: Complex64) -> Self {
        assert_eq!(k.len(), grid.dim(), "wave vector has wrong dimension");
        let dk = grid.dk();
        let values = (0..grid.len())
            .map(|i| {
                let x = grid.point(i);
                let phase: f64 = k.iter().zip(&x).map(|(&kj, &xj)| kj as f64 * dk * xj).sum();
                amplitude * Complex64::from_polar(1.0, phase)
            })
            .collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn spectrum(&self) -> Spectrum {
        let mut coeffs = self.values.clone();
        fft::forward(&self.grid, &mut coeffs);
        Spectrum { grid: self.grid, coeffs }
    }

    /// Pointwise map; the result is re-validated.
    pub fn map(&self, f: impl Fn(Complex64) -> Complex64 + Sync) -> Result<Self, SpectralError> {
        Self::new(self.grid, self.values.iter().map(|&z| f(z)).collect())
    }

    /// Same samples reinterpreted on another grid with identical point count.
    pub fn with_grid(&self, grid: Grid) -> Result<Self, SpectralError> {
        if grid.dim() != self.grid.dim() || grid.n() != self.grid.n() {
            return Err(SpectralError::GridMismatch);
        }
        Ok(Self { grid, values: self.values.clone() })
    }

    /// `self - other` on the same grid.
    pub fn sub(&self, other: &Field) -> Result<Self, SpectralError> {
        if self.grid != other.grid {
            return Err(SpectralError::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Self::new(self.grid, values)
    }

    pub fn add(&self, other: &Field) -> Result<Self, SpectralError> {
        if self.grid != other.grid {
            return Err(SpectralError::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Self::new(self.grid, values)
    }

    pub fn scale(&self, factor: f64) -> Result<Self, SpectralError> {
        self.map(|z| z * factor)
    }

    /// Grid-quadrature L2 norm, `(sum |f|^2 (ell/n)^d)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }
}

impl Spectrum {
    pub fn new(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self, SpectralError> {
        if coeffs.len() != grid.len() {
            return Err(SpectralError::LengthMismatch { expected: grid.len(), got: coeffs.len() });
        }
        check_finite(&coeffs)?;
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn to_field(&self) -> Result<Field, SpectralError> {
        let mut values = self.coeffs.clone();
        fft::inverse(&self.grid, &mut values);
        Field::new(self.grid, values)
    }

    /// Multiplies every coefficient by `symbol(|xi|)`.
    pub fn multiply_radial(&self, symbol: impl Fn(f64) -> Complex64) -> Result<Self, SpectralError> {
        let radii = self.grid.radii();
        let coeffs = self.coeffs.iter().zip(&radii).map(|(c, &r)| c * symbol(r)).collect();
        Self::new(self.grid, coeffs)
    }

    /// Spectral-side L2 norm with the same cell volume as [`Field::l2_norm`].
    pub fn l2_norm(&self) -> f64 {
        self.weighted_norm(|_| 1.0)
    }

    /// `(cell_volume * sum w(|xi|) |c|^2)^{1/2}`.
    pub fn weighted_norm(&self, weight: impl Fn(f64) -> f64) -> f64 {
        let radii = self.grid.radii();
        let sum: f64 = self.coeffs.iter().zip(&radii).map(|(c, &r)| weight(r) * c.norm_sqr()).sum();
        (sum * self.grid.cell_volume()).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rejects_non_finite_samples() {
        let g = Grid::new(1, 8, 1.0).unwrap();
        let mut v = vec![Complex64::new(1.0, 0.0); 8];
        v[3] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(Field::new(g, v), Err(SpectralError::NonFinite { index: 3 })));
        assert!(matches!(
            Field::new(g, vec![Complex64::new(0.0, 0.0); 7]),
            Err(SpectralError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn plane_wave_norm_is_root_volume() {
        let g = Grid::new(2, 8, 2.0 * PI).unwrap();
        let f = Field::plane_wave(g, &[2, -1], Complex64::new(1.0, 0.0));
        assert!((f.l2_norm() - g.volume().sqrt()).abs() < 1e-12);
        assert!((f.spectrum().l2_norm() - g.volume().sqrt()).abs() < 1e-12);
    }
}
