use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::SpectralError;

/// Default cap on the total number of lattice points, `n^dim`.
pub const DEFAULT_POINT_BUDGET: usize = 1 << 21;

/// Environment variable that overrides [`DEFAULT_POINT_BUDGET`].
pub const POINT_BUDGET_ENV: &str = "BIHNLS_POINT_BUDGET";

pub const MAX_DIM: usize = 7;

/// Periodic cubic lattice with `n` points per axis on a box of side `ell`.
///
/// Frequencies are `xi_j = (2 pi / ell) k_j` with `k_j` in `[-n/2, n/2)`.
/// Flat indices are row-major: the last axis is contiguous.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    n: usize,
    ell: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize, ell: f64) -> Result<Self, SpectralError> {
        Self::with_budget(dim, n, ell, DEFAULT_POINT_BUDGET)
    }

    /// Like [`Grid::new`] but with the budget taken from `BIHNLS_POINT_BUDGET`
    /// when it is set to a positive integer.
    pub fn from_env(dim: usize, n: usize, ell: f64) -> Result<Self, SpectralError> {
        Self::with_budget(dim, n, ell, point_budget_from_env()?)
    }

    pub fn with_budget(dim: usize, n: usize, ell: f64, budget: usize) -> Result<Self, SpectralError> {
        if dim == 0 || dim > MAX_DIM {
            return Err(SpectralError::Dimension(dim));
        }
        if !n.is_multiple_of(2) {
            return Err(SpectralError::OddResolution(n));
        }
        if n < 8 {
            return Err(SpectralError::ResolutionTooSmall(n));
        }
        if !(ell > 0.0 && ell.is_finite()) {
            return Err(SpectralError::BoxSize(ell));
        }
        let points = (n as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
        if points > budget as u128 {
            return Err(SpectralError::BudgetExceeded { points, budget });
        }
        Ok(Self { dim, n, ell })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Volume of one lattice cell, `(ell/n)^dim`.
    pub fn cell_volume(&self) -> f64 {
        (self.ell / self.n as f64).powi(self.dim as i32)
    }

    pub fn volume(&self) -> f64 {
        self.ell.powi(self.dim as i32)
    }

    pub fn spacing(&self) -> f64 {
        self.ell / self.n as f64
    }

    /// Frequency lattice spacing `2 pi / ell`.
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.ell
    }

    /// Integer wave numbers along one axis in FFT order: `0, 1, .., n/2-1, -n/2, .., -1`.
    pub fn wavenumbers(&self) -> Vec<i64> {
        let n = self.n as i64;
        (0..n).map(|k| if k < n / 2 { k } else { k - n }).collect()
    }

    /// Largest `|xi|` present on the lattice (the all-Nyquist corner).
    pub fn max_radius(&self) -> f64 {
        self.dk() * (self.n / 2) as f64 * (self.dim as f64).sqrt()
    }

    /// Largest per-axis frequency magnitude, `n/2 * 2 pi / ell`.
    pub fn axis_nyquist(&self) -> f64 {
        self.dk() * (self.n / 2) as f64
    }

    /// `|xi|` for every flat index, in FFT order.
    pub fn radii(&self) -> Vec<f64> {
        let ks = self.wavenumbers();
        let dk = self.dk();
        let sq: Vec<f64> = ks.iter().map(|&k| (k as f64 * dk).powi(2)).collect();
        let mut out = vec![0.0; self.len()];
        for (idx, r) in out.iter_mut().enumerate() {
            let mut rem = idx;
            let mut acc = 0.0;
            for _ in 0..self.dim {
                acc += sq[rem % self.n];
                rem /= self.n;
            }
            *r = acc.sqrt();
        }
        out
    }

    /// Physical coordinates of the point with flat index `idx`, on `[0, ell)^dim`.
    pub fn point(&self, idx: usize) -> Vec<f64> {
        let h = self.spacing();
        let mut coords = vec![0.0; self.dim];
        let mut rem = idx;
        for axis in (0..self.dim).rev() {
            coords[axis] = (rem % self.n) as f64 * h;
            rem /= self.n;
        }
        coords
    }

    /// Integer wave vector of the spectral coefficient with flat index `idx`.
    pub fn wavevector(&self, idx: usize) -> Vec<i64> {
        let n = self.n as i64;
        let mut k = vec![0; self.dim];
        let mut rem = idx;
        for axis in (0..self.dim).rev() {
            let j = (rem % self.n) as i64;
            k[axis] = if j < n / 2 { j } else { j - n };
            rem /= self.n;
        }
        k
    }

    /// Flat spectral index of an integer wave vector (components reduced mod n).
    pub fn spectral_index(&self, k: &[i64]) -> usize {
        assert_eq!(k.len(), self.dim, "wave vector has wrong dimension");
        let n = self.n as i64;
        k.iter().fold(0usize, |acc, &kj| acc * self.n + kj.rem_euclid(n) as usize)
    }

    /// Same lattice on a box scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self, SpectralError> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(SpectralError::BoxSize(self.ell * factor));
        }
        Ok(Self { ell: self.ell * factor, ..*self })
    }
}

pub fn point_budget_from_env() -> Result<usize, SpectralError> {
    match std::env::var(POINT_BUDGET_ENV) {
        Ok(raw) => raw
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&b| b > 0)
            .ok_or(SpectralError::BadBudget(raw)),
        Err(_) => Ok(DEFAULT_POINT_BUDGET),
    }
}
