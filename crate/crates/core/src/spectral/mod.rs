//! Periodic grids, unitary spectral transforms and radial Fourier multipliers.

pub mod fft;
mod field;
mod grid;
mod multiplier;

pub use field::{Field, Spectrum};
pub use grid::{point_budget_from_env, Grid, DEFAULT_POINT_BUDGET, MAX_DIM, POINT_BUDGET_ENV};
pub use multiplier::{
    apply_multiplier, i_symbol_profile, is_dyadic, lp_bump, lp_project, max_resolvable_dyadic, smoothstep,
    symbol_csv, LpKind, MultiplierSpec,
};

/// Builds a grid with the default point budget.
pub fn make_grid(dim: usize, n: usize, ell: f64) -> Result<Grid, SpectralError> {
    Grid::new(dim, n, ell)
}

#[derive(Debug, thiserror::Error)]
pub enum SpectralError {
    #[error("dimension {0} outside 1..={max}", max = MAX_DIM)]
    Dimension(usize),
    #[error("points per axis must be even, got {0}")]
    OddResolution(usize),
    #[error("points per axis must be at least 8, got {0}")]
    ResolutionTooSmall(usize),
    #[error("box side must be positive and finite, got {0}")]
    BoxSize(f64),
    #[error("grid has {points} points, over the budget of {budget}")]
    BudgetExceeded { points: u128, budget: usize },
    #[error("invalid point budget {0:?}")]
    BadBudget(String),
    #[error("expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("{0} is not a power of two")]
    NotDyadic(f64),
    #[error("dyadic scale {m} outside the resolvable range [1, {upper}]")]
    Unresolvable { m: f64, upper: f64 },
    #[error("smoothing exponent must lie in [0, 2), got {0}")]
    GammaRange(f64),
    #[error("frequency cutoff must be positive, got {0}")]
    Cutoff(f64),
    #[error("radius must be non-negative, got {0}")]
    Radius(f64),
    #[error("{0}")]
    Parameter(String),
}
