//! Root solve for the fourth threshold `γ₄(d, ν)`.
//!
//! For each `σ` the candidate `γ(d, ν, σ)` is the larger root in `(Γc, 2]` of
//!
//! ```text
//! Γc (2-γ) (d-5+(8-d)σ) = min{γ-1-Γc/2, ν-2, (ν-2)(γ-Γc)} (γ-Γc) σ
//! ```
//!
//! and `γ₄` minimizes it over `σ ∈ (0, σ₀]`. The constraint `σ₀ ≤ γ` couples
//! the window to the unknown threshold, which is resolved by fixed-point
//! iteration starting from `γ = 2`.

use super::{check_nu, check_theorem_window, critical_exponent, ExponentError, STRICT_MARGIN};

/// Points in the downward sign scan over `(Γc, 2]`.
const SCAN_STEPS: usize = 4096;
const BISECTION_ITERS: usize = 200;
const FIXED_POINT_TOL: f64 = 1e-10;
const FIXED_POINT_MAX_ITERS: usize = 200;
/// Points of the σ grid used to check that the root is non-increasing in σ.
const SIGMA_SCAN: usize = 100;

/// Open/closed σ interval allowed by the two γ-independent constraints on σ₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaWindow {
    /// Exclusive lower bound (at least 0).
    pub lower: f64,
    /// Inclusive upper bound; `f64::INFINITY` when unconstrained.
    pub upper: f64,
}

impl SigmaWindow {
    pub fn is_empty(&self) -> bool {
        !(self.upper > self.lower)
    }
}

/// Intersects `2σ(16-(ν-1)(d+4)) < (d-5)(d(ν-1)-8)` and `2σ(ν-3) ≤ d-5` with `σ > 0`.
pub fn sigma_window(d: u32, nu: f64) -> Result<SigmaWindow, ExponentError> {
    check_nu(nu)?;
    let df = d as f64;
    let mut w = SigmaWindow { lower: 0.0, upper: f64::INFINITY };

    // strict: a σ < b
    let a = 2.0 * (16.0 - (nu - 1.0) * (df + 4.0));
    let b = (df - 5.0) * (df * (nu - 1.0) - 8.0);
    if a > 0.0 {
        w.upper = w.upper.min(b / a - STRICT_MARGIN);
    } else if a < 0.0 {
        w.lower = w.lower.max(b / a);
    } else if !(b > 0.0) {
        w.upper = 0.0;
    }

    // closed: c σ <= e
    let c = 2.0 * (nu - 3.0);
    let e = df - 5.0;
    if c > 0.0 {
        w.upper = w.upper.min(e / c);
    } else if c < 0.0 {
        w.lower = w.lower.max(e / c);
    } else if e < 0.0 {
        w.upper = 0.0;
    }
    Ok(w)
}

/// Largest `σ₀ > 0` satisfying all three constraints, `σ₀ ≤ γ` included.
pub fn sigma0_max(d: u32, nu: f64, gamma: f64) -> Result<f64, ExponentError> {
    let w = sigma_window(d, nu)?;
    let upper = w.upper.min(gamma);
    if upper > w.lower && upper > 0.0 {
        Ok(upper)
    } else {
        Err(ExponentError::Infeasible(format!(
            "d = {d}, nu = {nu}, gamma = {gamma}: sigma window ({}, {}] is empty",
            w.lower, upper
        )))
    }
}

/// Left side minus right side of the defining equation.
pub fn threshold_equation(d: u32, nu: f64, gamma: f64, sigma: f64) -> f64 {
    let gc = d as f64 / 2.0 - 4.0 / (nu - 1.0);
    let df = d as f64;
    let lhs = gc * (2.0 - gamma) * (df - 5.0 + (8.0 - df) * sigma);
    lhs - gain(nu, gc, gamma) * (gamma - gc) * sigma
}

fn gain(nu: f64, gc: f64, gamma: f64) -> f64 {
    (gamma - 1.0 - gc / 2.0).min(nu - 2.0).min((nu - 2.0) * (gamma - gc))
}

/// The equation divided by σ. At `d = 5` it no longer depends on σ, which
/// keeps the `σ → 0⁺` limit well defined.
fn normalized_equation(d: u32, nu: f64, gamma: f64, sigma: f64) -> f64 {
    let gc = d as f64 / 2.0 - 4.0 / (nu - 1.0);
    let df = d as f64;
    let spread = if d == 5 { 0.0 } else { (df - 5.0) / sigma };
    gc * (2.0 - gamma) * (spread + 8.0 - df) - gain(nu, gc, gamma) * (gamma - gc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootInfo {
    pub root: f64,
    /// Number of sign changes seen in the scan over `(Γc, 2]`.
    pub sign_changes: usize,
}

/// Larger root of the defining equation in `(Γc + 1e-9, 2]` for a fixed σ.
pub fn larger_root(d: u32, nu: f64, sigma: f64) -> Result<RootInfo, ExponentError> {
    let gc = critical_exponent(d, nu)?;
    let f = |g: f64| normalized_equation(d, nu, g, sigma);
    let lo = gc + 1e-9;
    if lo >= 2.0 {
        return Err(ExponentError::ThresholdAtLeastTwo { sigma });
    }
    let step = (2.0 - lo) / SCAN_STEPS as f64;
    let mut bracket = None;
    let mut sign_changes = 0;
    let mut prev_g = 2.0;
    let mut prev_f = f(prev_g);
    if prev_f == 0.0 {
        bracket = Some((2.0, 2.0));
    }
    for i in 1..=SCAN_STEPS {
        let g = if i == SCAN_STEPS { lo } else { 2.0 - step * i as f64 };
        let fg = f(g);
        if (fg > 0.0) != (prev_f > 0.0) || fg == 0.0 {
            sign_changes += 1;
            if bracket.is_none() {
                bracket = Some((g, prev_g));
            }
        }
        prev_g = g;
        prev_f = fg;
    }
    let (mut a, mut b) = bracket.ok_or(ExponentError::ThresholdAtLeastTwo { sigma })?;
    let fa_pos = f(a) > 0.0;
    for _ in 0..BISECTION_ITERS {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            a = mid;
            b = mid;
            break;
        }
        if (fm > 0.0) == fa_pos {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(RootInfo { root: 0.5 * (a + b), sign_changes })
}

/// Outcome of the `γ₄` minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gamma4 {
    pub gamma4: f64,
    /// Minimizing σ; zero when the σ window is degenerate at `d = 5`.
    pub sigma_star: f64,
    /// Upper end of the σ window used, `min(σ₀ bound, γ₄)`.
    pub sigma0: f64,
    /// `|equation|` at the returned root.
    pub residual: f64,
    /// The root was non-increasing over the σ grid, so the minimum sits at σ₀.
    pub sigma_monotone: bool,
    /// The feasible σ set is empty and the σ-free `d = 5` limit was used.
    pub degenerate_window: bool,
    /// More than one root was seen in `(Γc, 2]`; the largest is reported.
    pub multiple_roots: bool,
    pub fixed_point_iterations: usize,
}

pub fn gamma4(d: u32, nu: f64) -> Result<Gamma4, ExponentError> {
    check_theorem_window(d, nu)?;
    let window = sigma_window(d, nu)?;

    if window.is_empty() || window.upper <= 0.0 {
        if d != 5 {
            return Err(ExponentError::Infeasible(format!(
                "d = {d}, nu = {nu}: sigma window ({}, {}] is empty",
                window.lower, window.upper
            )));
        }
        let info = larger_root(d, nu, 1.0)?;
        return Ok(Gamma4 {
            gamma4: info.root,
            sigma_star: 0.0,
            sigma0: 0.0,
            residual: threshold_equation(d, nu, info.root, 1.0).abs(),
            sigma_monotone: true,
            degenerate_window: true,
            multiple_roots: info.sign_changes > 1,
            fixed_point_iterations: 0,
        });
    }

    let mut gamma = 2.0;
    let mut iterations = 0;
    let mut info = None;
    for it in 1..=FIXED_POINT_MAX_ITERS {
        iterations = it;
        let sigma = window.upper.min(gamma);
        if !(sigma > window.lower) {
            return Err(ExponentError::Infeasible(format!(
                "sigma = {sigma} falls below the window's lower bound {}",
                window.lower
            )));
        }
        let next = larger_root(d, nu, sigma)?;
        let delta = (next.root - gamma).abs();
        gamma = next.root;
        info = Some(next);
        if delta < FIXED_POINT_TOL {
            break;
        }
    }
    let info = info.expect("at least one fixed-point iteration runs");
    let sigma0 = window.upper.min(gamma);

    let grid: Vec<f64> = (1..=SIGMA_SCAN)
        .map(|i| window.lower + (sigma0 - window.lower) * i as f64 / SIGMA_SCAN as f64)
        .collect();
    let roots: Vec<f64> = grid
        .iter()
        .map(|&s| larger_root(d, nu, s).map(|r| r.root).unwrap_or(2.0))
        .collect();
    let monotone = roots.windows(2).all(|w| w[1] <= w[0] + 1e-12);

    let (gamma4, sigma_star, multiple) = if monotone {
        let at_edge = larger_root(d, nu, sigma0)?;
        (at_edge.root, sigma0, info.sign_changes > 1 || at_edge.sign_changes > 1)
    } else {
        let (idx, &best) = roots
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("sigma grid is non-empty");
        (best, grid[idx], info.sign_changes > 1)
    };

    Ok(Gamma4 {
        gamma4,
        sigma_star,
        sigma0,
        residual: threshold_equation(d, nu, gamma4, sigma_star).abs(),
        sigma_monotone: monotone,
        degenerate_window: false,
        multiple_roots: multiple,
        fixed_point_iterations: iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma0_examples() {
        assert_eq!(sigma0_max(6, 4.0, 1.99).unwrap(), 0.5);
        for g in [0.3, 1.2, 1.9] {
            assert_eq!(sigma0_max(5, 3.0, g).unwrap(), g);
        }
        assert_eq!(sigma0_max(7, 3.0, 1.9).unwrap(), 1.9);
        assert!(matches!(sigma0_max(5, 4.0, 1.9), Err(ExponentError::Infeasible(_))));
    }

    #[test]
    fn sigma0_respects_all_constraints() {
        for d in 5..=11u32 {
            for nu in [2.2, 2.6, 3.0, 3.5] {
                let Ok(s) = sigma0_max(d, nu, 1.95) else { continue };
                let df = d as f64;
                assert!(2.0 * s * (16.0 - (nu - 1.0) * (df + 4.0)) < (df - 5.0) * (df * (nu - 1.0) - 8.0) + 1e-9);
                assert!(2.0 * s * (nu - 3.0) <= df - 5.0 + 1e-12);
                assert!(s <= 1.95);
            }
        }
    }

    #[test]
    fn cubic_d5_closed_form() {
        // At d = 5, nu = 3 the root solves g^2 - g/4 - 19/8 = 0.
        let expected = (0.25 + (0.0625f64 + 9.5).sqrt()) / 2.0;
        let r = larger_root(5, 3.0, 0.7).unwrap();
        assert!((r.root - expected).abs() < 1e-13);
        assert_eq!(r.sign_changes, 1);
    }

    #[test]
    fn returned_root_is_the_larger_one() {
        for (d, nu) in [(5, 3.0), (6, 3.0), (7, 3.0), (6, 4.0)] {
            let g = gamma4(d, nu).unwrap();
            assert!(g.residual < 1e-9, "residual {}", g.residual);
            let above = threshold_equation(d, nu, g.gamma4 + 1e-6, g.sigma_star);
            assert!(above < 0.0, "equation must be negative just above the larger root");
            assert!(g.sigma_star <= g.gamma4 + 1e-12);
        }
    }

    #[test]
    fn outside_window_is_rejected() {
        assert!(matches!(gamma4(4, 3.0), Err(ExponentError::OutsideWindow { .. })));
        assert!(matches!(gamma4(5, 2.5), Err(ExponentError::OutsideWindow { .. })));
    }
}
