use crate::dynamics::{free_propagate, Trajectory};
use crate::exponents::{admissibility, m_sigma_pair};
use crate::spectral::{apply_multiplier, Field, MultiplierSpec};

use super::{lebesgue_norm, sobolev_norm, DiagnosticsError};

/// `‖g‖_{L^p(J)}` for samples `g(t_k)`: trapezoid on `g^p`, or the maximum when `p = ∞`.
/// A single sample has zero time measure, so finite `p` gives 0 there.
pub fn spacetime_norm_from_samples(times: &[f64], values: &[f64], p: f64) -> Result<f64, DiagnosticsError> {
    if times.len() != values.len() {
        return Err(DiagnosticsError::Invalid(format!("{} times but {} values", times.len(), values.len())));
    }
    if times.is_empty() {
        return Err(DiagnosticsError::NoSnapshots);
    }
    if !(p >= 1.0) {
        return Err(DiagnosticsError::BadExponent(p));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(DiagnosticsError::Invalid("sample times must be strictly increasing".into()));
    }
    if p.is_infinite() {
        return Ok(values.iter().copied().fold(0.0, f64::max));
    }
    let integral: f64 = times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0].powf(p) + v[1].powf(p)))
        .sum();
    Ok(integral.powf(1.0 / p))
}

fn stored(traj: &Trajectory) -> Result<&[Field], DiagnosticsError> {
    if traj.fields.is_empty() {
        return Err(DiagnosticsError::NoSnapshots);
    }
    if traj.fields.len() != traj.times.len() {
        return Err(DiagnosticsError::Invalid("snapshots do not align with sample times".into()));
    }
    Ok(&traj.fields)
}

fn norm_over(
    traj: &Trajectory,
    p: f64,
    q: f64,
    transform: impl Fn(&Field) -> Result<Field, DiagnosticsError>,
) -> Result<f64, DiagnosticsError> {
    let values = stored(traj)?
        .iter()
        .map(|f| lebesgue_norm(&transform(f)?, q))
        .collect::<Result<Vec<_>, _>>()?;
    spacetime_norm_from_samples(&traj.times, &values, p)
}

/// `‖u‖_{L^p_t L^q_x}` over the sampled interval.
pub fn spacetime_norm(traj: &Trajectory, p: f64, q: f64) -> Result<f64, DiagnosticsError> {
    norm_over(traj, p, q, |f| Ok(f.clone()))
}

/// `‖u‖_{M^σ}`, the space-time norm at the pair of `m_sigma_pair(d, σ)`.
pub fn m_sigma_norm(traj: &Trajectory, sigma: f64, d: u32) -> Result<f64, DiagnosticsError> {
    let (p, q) = m_sigma_pair(d, sigma)?;
    spacetime_norm(traj, p, q)
}

/// `‖|∇|^{-(d-5)/4} u‖_{L⁴_t L⁴_x}`.
pub fn morawetz_norm(traj: &Trajectory, d: u32) -> Result<f64, DiagnosticsError> {
    let weight = MultiplierSpec::MorawetzWeight { d };
    norm_over(traj, 4.0, 4.0, |f| Ok(apply_multiplier(f, &weight)?))
}

/// Biharmonic-admissible pairs `(p, q)` with `p ∈ {2, 3, 4, 6, 8, ∞}` and finite `q`.
pub fn default_pair_family(d: u32) -> Vec<(f64, f64)> {
    let df = d as f64;
    [2.0, 3.0, 4.0, 6.0, 8.0, f64::INFINITY]
        .into_iter()
        .filter_map(|p: f64| {
            let q = if p.is_infinite() { 2.0 } else { 2.0 * df * p / (df * p - 8.0) };
            (q.is_finite() && q > 0.0 && admissibility(p, q, d).biharmonic_admissible).then_some((p, q))
        })
        .collect()
}

/// `Z_I = max over the family of ‖⟨Δ⟩ I_N u‖_{L^p_t L^q_x}`.
pub fn z_i_norm(traj: &Trajectory, cutoff: f64, gamma: f64, family: &[(f64, f64)]) -> Result<f64, DiagnosticsError> {
    if family.is_empty() {
        return Err(DiagnosticsError::Invalid("empty pair family".into()));
    }
    let smoothing = MultiplierSpec::ISmoothing { cutoff, gamma };
    let bracket = MultiplierSpec::Bracket { s: 2.0 };
    let lifted = stored(traj)?
        .iter()
        .map(|f| Ok(apply_multiplier(&apply_multiplier(f, &smoothing)?, &bracket)?))
        .collect::<Result<Vec<Field>, DiagnosticsError>>()?;
    let mut best: f64 = 0.0;
    for &(p, q) in family {
        let values = lifted.iter().map(|f| lebesgue_norm(f, q)).collect::<Result<Vec<_>, _>>()?;
        best = best.max(spacetime_norm_from_samples(&traj.times, &values, p)?);
    }
    Ok(best)
}

/// `(‖u₀‖_{L²} sup‖u‖_{Ḣ^{1/2}})^{2σ/a} (sup‖u‖_{Ḣ^σ})^{(d-5)/a}` with `a = d-5+4σ`,
/// the interpolation bound for `‖u‖_{M^σ}`.
pub fn interpolation_bound(l2_initial: f64, sup_half: f64, sup_sigma: f64, sigma: f64, d: u32) -> Result<f64, DiagnosticsError> {
    let a = d as f64 - 5.0 + 4.0 * sigma;
    if !(sigma > 0.0 && a > 0.0) {
        return Err(DiagnosticsError::Invalid(format!("no interpolation bound at d = {d}, sigma = {sigma}")));
    }
    Ok((l2_initial * sup_half).powf(2.0 * sigma / a) * sup_sigma.powf((d as f64 - 5.0) / a))
}

/// `‖u‖_{M^σ}` divided by its interpolation bound, using the trajectory's rows for the sup norms.
pub fn interpolation_ratio(traj: &Trajectory, sigma: f64, d: u32) -> Result<f64, DiagnosticsError> {
    let first = traj.rows.first().ok_or(DiagnosticsError::NoSnapshots)?;
    let sup_half = traj.rows.iter().map(|r| r.hdot_half).fold(0.0, f64::max);
    let sup_sigma = traj.rows.iter().map(|r| r.hdot_sigma).fold(0.0, f64::max);
    let bound = interpolation_bound(first.mass.sqrt(), sup_half, sup_sigma, sigma, d)?;
    Ok(m_sigma_norm(traj, sigma, d)? / bound)
}

/// `‖e^{-it₂Δ²}u₂ - e^{-it₁Δ²}u₁‖_{H^γ}`.
pub fn scattering_residual_fields(u1: &Field, t1: f64, u2: &Field, t2: f64, gamma: f64) -> Result<f64, DiagnosticsError> {
    let v1 = free_propagate(u1, -t1)?;
    let v2 = free_propagate(u2, -t2)?;
    Ok(sobolev_norm(&v2.sub(&v1)?, gamma, false))
}

fn snapshot_at(traj: &Trajectory, t: f64) -> Result<&Field, DiagnosticsError> {
    let fields = stored(traj)?;
    let tol = 1e-9 * traj.times.last().copied().unwrap_or(0.0).abs().max(1.0);
    traj.times
        .iter()
        .position(|&s| (s - t).abs() <= tol)
        .map(|i| &fields[i])
        .ok_or(DiagnosticsError::MissingTime(t))
}

/// Scattering residual between two stored samples of the trajectory.
pub fn scattering_residual(traj: &Trajectory, gamma: f64, t1: f64, t2: f64) -> Result<f64, DiagnosticsError> {
    let u1 = snapshot_at(traj, t1)?;
    let u2 = snapshot_at(traj, t2)?;
    scattering_residual_fields(u1, t1, u2, t2, gamma)
}
