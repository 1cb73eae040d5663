//! Scalar exponent calculus: critical regularity, admissible pairs, the
//! regularity threshold `γ(d, ν)` and the bookkeeping exponents used by the
//! almost-conservation and scattering arguments.
//!
//! Everything here is a pure function of its arguments. Exponents equal to
//! infinity (for instance `p = ∞` in a space-time pair) are plain
//! `f64::INFINITY`, so `4/p` evaluates to zero without special cases.

mod admissibility;
mod report;
mod threshold;

pub use admissibility::{admissibility, gamma_pq, schrodinger_admissible, PairVerdict};
pub use report::{gamma_threshold, ExponentReport};
pub use threshold::{
    gamma4, larger_root, sigma0_max, sigma_window, threshold_equation, Gamma4, RootInfo, SigmaWindow,
};

use num_rational::Ratio;

/// Interior margin used to turn strict inequalities into closed ones.
pub const STRICT_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExponentError {
    #[error("nonlinearity exponent must exceed 1, got {0}")]
    NuTooSmall(f64),
    #[error("no admissible sigma: {0}")]
    Infeasible(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("theta = {0} lies outside (0, 1)")]
    ThetaOutOfRange(f64),
    #[error("no root in (gamma_c, 2] for sigma = {sigma}: threshold >= 2")]
    ThresholdAtLeastTwo { sigma: f64 },
    #[error("epsilon too large: alpha = {alpha}, beta = {beta}")]
    EpsilonTooLarge { alpha: f64, beta: f64 },
    #[error("({d}, {nu}) is outside the supported window: {reason}")]
    OutsideWindow { d: u32, nu: f64, reason: String },
}

fn check_nu(nu: f64) -> Result<(), ExponentError> {
    if nu > 1.0 && nu.is_finite() {
        Ok(())
    } else {
        Err(ExponentError::NuTooSmall(nu))
    }
}

/// `Γc = d/2 - 4/(ν-1)`, the scale-invariant Sobolev index.
pub fn critical_exponent(d: u32, nu: f64) -> Result<f64, ExponentError> {
    check_nu(nu)?;
    Ok(d as f64 / 2.0 - 4.0 / (nu - 1.0))
}

/// Exact rational `Γc` for integer `ν`.
pub fn critical_exponent_exact(d: u32, nu: i64) -> Result<Ratio<i64>, ExponentError> {
    if nu <= 1 {
        return Err(ExponentError::NuTooSmall(nu as f64));
    }
    Ok(Ratio::new(d as i64, 2) - Ratio::new(4, nu - 1))
}

/// The three closed-form thresholds `(γ₁, γ₂, γ₃)`.
pub fn gamma123(d: u32, nu: f64) -> Result<(f64, f64, f64), ExponentError> {
    let gc = critical_exponent(d, nu)?;
    Ok((1.5 + gc / 4.0, 4.0 - nu, 2.0 / (nu - 1.0) + (nu - 2.0) * gc / (nu - 1.0)))
}

/// Mass-supercritical, energy-subcritical window `1 + 8/d < ν < 1 + 8/(d-4)` with `5 <= d <= 11`.
pub fn check_theorem_window(d: u32, nu: f64) -> Result<(), ExponentError> {
    let out = |reason: String| Err(ExponentError::OutsideWindow { d, nu, reason });
    if !(5..=11).contains(&d) {
        return out("dimension must lie in 5..=11".into());
    }
    let df = d as f64;
    if !(nu > 1.0 + 8.0 / df && nu < 1.0 + 8.0 / (df - 4.0)) {
        return out(format!("need {} < nu < {}", 1.0 + 8.0 / df, 1.0 + 8.0 / (df - 4.0)));
    }
    Ok(())
}

/// Interpolation weight `θ` of the low-frequency Hölder step. Must lie in `(0, 1)`.
pub fn theta(d: u32, nu: f64, sigma: f64) -> Result<f64, ExponentError> {
    check_nu(nu)?;
    let df = d as f64;
    let num = (df - 5.0 + 4.0 * sigma) * (8.0 - (df - 4.0) * (nu - 1.0));
    let den = 2.0 * (nu - 1.0) * (2.0 * (df - 5.0) + (12.0 - df) * sigma);
    let th = num / den;
    if th > 0.0 && th < 1.0 {
        Ok(th)
    } else {
        Err(ExponentError::ThetaOutOfRange(th))
    }
}

/// `ε = 4(ν-1)σ / (d-5+4σ-2(ν-1)σ)`.
///
/// A vanishing denominator is the endpoint `ν-1 = (d-5+4σ)/(2σ)`, returned as
/// `f64::INFINITY`; the commutator bounds stay valid there.
pub fn epsilon_of(d: u32, nu: f64, sigma: f64) -> Result<f64, ExponentError> {
    check_nu(nu)?;
    let df = d as f64;
    let den = df - 5.0 + 4.0 * sigma - 2.0 * (nu - 1.0) * sigma;
    let scale = (df - 5.0 + 4.0 * sigma).abs().max(1.0);
    if den.abs() <= 1e-12 * scale {
        Ok(f64::INFINITY)
    } else if den < 0.0 {
        Err(ExponentError::Hypothesis(format!(
            "nu - 1 = {} exceeds (d-5+4 sigma)/(2 sigma) = {}",
            nu - 1.0,
            (df - 5.0 + 4.0 * sigma) / (2.0 * sigma)
        )))
    } else {
        Ok(4.0 * (nu - 1.0) * sigma / den)
    }
}

/// Open window on `ν - 1` under which the commutator estimates hold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuWindow {
    pub lower: f64,
    pub upper: f64,
    /// `(d-5+4σ)/(2σ)`; reaching it exactly is allowed (the `ε = ∞` endpoint).
    pub endpoint: f64,
}

impl NuWindow {
    /// Whether `ν - 1` lies in the window, counting the `ε = ∞` endpoint as inside.
    pub fn contains(&self, nu: f64) -> bool {
        let x = nu - 1.0;
        let at_endpoint = (x - self.endpoint).abs() <= 1e-12 * self.endpoint.abs().max(1.0) && self.endpoint <= self.upper;
        x > self.lower && (x < self.upper || at_endpoint)
    }
}

/// `max{8(d-5+4σ)/(d(d-5+2σ)+8σ), 1} < ν-1 < min{(d-5+4σ)/(2σ), 8/(d-2γ)}`.
pub fn nu_window(d: u32, gamma: f64, sigma: f64) -> NuWindow {
    let df = d as f64;
    let a = df - 5.0 + 4.0 * sigma;
    let lower = (8.0 * a / (df * (df - 5.0 + 2.0 * sigma) + 8.0 * sigma)).max(1.0);
    let endpoint = a / (2.0 * sigma);
    let sobolev = if df - 2.0 * gamma > 0.0 { 8.0 / (df - 2.0 * gamma) } else { f64::INFINITY };
    NuWindow { lower, upper: endpoint.min(sobolev), endpoint }
}

/// Exponents `q, q*, r, r*` of the second-derivative Hölder step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QrExponents {
    pub q: f64,
    pub q_star: f64,
    pub r: f64,
    pub r_star: f64,
}

impl QrExponents {
    /// The pairs `(4k/(k-2), q*)` and `(k(ν-2), r*)`.
    pub fn pairs(&self, k: u32, nu: f64) -> [(f64, f64); 2] {
        let kf = k as f64;
        [(4.0 * kf / (kf - 2.0), self.q_star), (kf * (nu - 2.0), self.r_star)]
    }
}

pub fn qr_exponents(d: u32, nu: f64, k: u32) -> Result<QrExponents, ExponentError> {
    check_nu(nu)?;
    let (kf, df) = (k as f64, d as f64);
    if k <= 2 || kf * (nu - 2.0) < 2.0 {
        return Err(ExponentError::Hypothesis(format!("need k > 2 and k(nu-2) >= 2, got k = {k}")));
    }
    let m = nu - 1.0;
    Ok(QrExponents {
        q: 4.0 * kf * df * m / ((kf * df - 4.0 * (kf - 2.0)) * m + 8.0 * kf),
        q_star: 2.0 * kf * df / (kf * df - 2.0 * (kf - 2.0)),
        r: kf * df * m / (4.0 * (kf - 1.0) * m - 4.0 * kf),
        r_star: 2.0 * kf * df / (kf * df * (nu - 2.0) - 8.0),
    })
}

/// Rescaling parameter `λ = N^{(2-γ)/(γ-Γc)}`.
pub fn lambda_of_n(n: f64, gamma: f64, gamma_c: f64) -> f64 {
    n.powf((2.0 - gamma) / (gamma - gamma_c))
}

/// Exponent `Γc(d-5+(8-d)σ)/σ` of `λ` in the subinterval count.
pub fn interval_count_exponent(d: u32, nu: f64, sigma: f64) -> Result<f64, ExponentError> {
    let gc = critical_exponent(d, nu)?;
    let df = d as f64;
    Ok(gc * (df - 5.0 + (8.0 - df) * sigma) / sigma)
}

/// Number of small-norm subintervals, `L ~ λ^{Γc(d-5+(8-d)σ)/σ}`.
pub fn interval_count(lambda: f64, d: u32, nu: f64, sigma: f64) -> Result<f64, ExponentError> {
    Ok(lambda.powf(interval_count_exponent(d, nu, sigma)?))
}

/// `sup` of the admissible energy-increment gain,
/// `min{2γ-3-Γc/2, γ+ν-4, (ν-1)γ-2-(ν-2)Γc}`.
pub fn delta_max(d: u32, nu: f64, gamma: f64) -> Result<f64, ExponentError> {
    let gc = critical_exponent(d, nu)?;
    Ok((2.0 * gamma - 3.0 - gc / 2.0)
        .min(gamma + nu - 4.0)
        .min((nu - 1.0) * gamma - 2.0 - (nu - 2.0) * gc))
}

/// `Γc(2-γ)(d-5+(8-d)σ) < (2-γ+δ)(γ-Γc)σ`: the bootstrap closes at regularity `γ`.
pub fn gamma_condition_holds(d: u32, nu: f64, gamma: f64, sigma: f64, delta: f64) -> Result<bool, ExponentError> {
    let gc = critical_exponent(d, nu)?;
    let df = d as f64;
    let lhs = gc * (2.0 - gamma) * (df - 5.0 + (8.0 - df) * sigma);
    let rhs = (2.0 - gamma + delta) * (gamma - gc) * sigma;
    Ok(lhs < rhs)
}

/// Space-time exponents `(p, q)` of the `M^σ` norm.
pub fn m_sigma_pair(d: u32, sigma: f64) -> Result<(f64, f64), ExponentError> {
    let df = d as f64;
    let a = df - 5.0 + 4.0 * sigma;
    let b = df - 5.0 + 2.0 * sigma;
    if !(sigma > 0.0) || a <= 0.0 || b <= 0.0 {
        return Err(ExponentError::Hypothesis(format!("M^sigma exponents undefined for d = {d}, sigma = {sigma}")));
    }
    Ok((a / sigma, 2.0 * a / b))
}

/// The biharmonic pair `((d-5+4σ)/σ, 2d(d-5+4σ)/(d(d-5+4σ)-8σ))`.
pub fn morawetz_strichartz_pair(d: u32, sigma: f64) -> (f64, f64) {
    let df = d as f64;
    let a = df - 5.0 + 4.0 * sigma;
    (a / sigma, 2.0 * df * a / (df * a - 8.0 * sigma))
}

/// Exponents controlling the scattering norm by `M^σ`, mass and `Ḣ^γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringExponents {
    pub alpha: f64,
    pub beta: f64,
    pub theta1: f64,
    pub theta2: f64,
}

pub fn scattering_exponents(d: u32, gamma: f64, sigma: f64, nu: f64, eps: f64) -> Result<ScatteringExponents, ExponentError> {
    check_nu(nu)?;
    let df = d as f64;
    let m = nu - 1.0;
    if !(m > 8.0 / df && (df - 2.0 * gamma <= 0.0 || m < 8.0 / (df - 2.0 * gamma))) {
        return Err(ExponentError::Hypothesis(format!("need 8/d < nu-1 < 8/(d-2 gamma), got nu-1 = {m}")));
    }
    let a = df - 5.0 + 4.0 * sigma;
    if !((df - 4.0) * sigma / a < gamma) {
        return Err(ExponentError::Hypothesis("need (d-4) sigma / (d-5+4 sigma) < gamma".into()));
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(ExponentError::Hypothesis(format!("epsilon must be finite and non-negative, got {eps}")));
    }
    let alpha = (1.0 - df / (2.0 * gamma)) * m
        + (16.0 * sigma + eps * ((df + 4.0) * sigma - gamma * a)) / (2.0 * gamma * sigma * (2.0 + eps));
    let beta = df / gamma * (m / 2.0 - (16.0 + eps * (df + 4.0)) / (2.0 * df * (2.0 + eps)));
    let theta1 = eps * a / (2.0 * m * (2.0 + eps) * sigma);
    let inv_q = (4.0 * (2.0 * eps + 8.0) * sigma - df * eps * (df - 5.0 + 2.0 * sigma))
        / (4.0 * df * sigma * m * (2.0 + eps))
        / (1.0 - theta1);
    let theta2 = (inv_q - (df - 2.0 * gamma) / (2.0 * df)) * df / gamma;
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(ExponentError::EpsilonTooLarge { alpha, beta });
    }
    Ok(ScatteringExponents { alpha, beta, theta1, theta2 })
}
