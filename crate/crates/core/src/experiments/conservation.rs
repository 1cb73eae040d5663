use super::{gaussian_bumps, ExperimentConfig, ExperimentError, ExperimentReport, Outcome};
use crate::diagnostics::{interpolation_bound, spacetime_norm_from_samples, LebesgueObserver, Observer, RowParams};
use crate::dynamics::{evolve, write_snapshot, SolverConfig, Trajectory};
use crate::exponents::m_sigma_pair;

pub(super) fn row_params(cfg: &ExperimentConfig) -> RowParams {
    RowParams { nu: cfg.nu, gamma: cfg.gamma, cutoff: cfg.n_list[0], sigma: cfg.sigma }
}

pub(super) fn solver(cfg: &ExperimentConfig, dt: f64, sample_every: usize, store_fields: bool) -> SolverConfig {
    SolverConfig { sample_every, store_fields, ..SolverConfig::new(cfg.nu, dt, cfg.t_end) }
}

/// Samples `‖u(t)‖_{L^q}` for the `M^σ` exponent `q`.
pub(super) fn m_sigma_observer(cfg: &ExperimentConfig) -> Result<LebesgueObserver, ExperimentError> {
    let (_, q) = m_sigma_pair(cfg.theory_d, cfg.sigma)?;
    Ok(LebesgueObserver { q, multiplier: None })
}

/// Records `m_sigma_norm` and the ratio of it to its interpolation bound.
/// Returns the `M^σ` norm.
pub(super) fn record_interpolation(
    report: &mut ExperimentReport,
    cfg: &ExperimentConfig,
    traj: &Trajectory,
    obs: &LebesgueObserver,
) -> Result<Option<f64>, ExperimentError> {
    let (p, _) = m_sigma_pair(cfg.theory_d, cfg.sigma)?;
    let Some(first) = traj.rows.first() else { return Ok(None) };
    let values: Vec<f64> = traj.rows.iter().filter_map(|r| r.extra(&obs.name())).collect();
    let m_sigma = spacetime_norm_from_samples(&traj.times, &values, p)?;
    let sup = |f: fn(&crate::diagnostics::DiagnosticsRow) -> f64| traj.rows.iter().map(f).fold(0.0, f64::max);
    let bound = interpolation_bound(first.mass.sqrt(), sup(|r| r.hdot_half), sup(|r| r.hdot_sigma), cfg.sigma, cfg.theory_d)?;
    report.metric("m_sigma_norm", m_sigma);
    let ratio = m_sigma / bound;
    report.metric("interpolation_ratio", if ratio.is_finite() { ratio.into() } else { serde_json::Value::Null });
    Ok(Some(m_sigma))
}

fn max_drift(traj: &Trajectory, value: impl Fn(&crate::diagnostics::DiagnosticsRow) -> f64) -> f64 {
    let v0 = traj.rows.first().map(&value).unwrap_or(0.0);
    traj.rows.iter().map(|r| (value(r) - v0).abs()).fold(0.0, f64::max)
}

fn relative(drift: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        drift
    } else {
        drift / scale
    }
}

/// Evolves with `dt` and `dt/2`; mass must stay put and the energy error must
/// shrink by about four. Also returns the final state of the `dt` run as a snapshot.
pub fn run_conservation(cfg: &ExperimentConfig) -> Result<(Outcome, Vec<u8>), ExperimentError> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let u0 = gaussian_bumps(grid, &cfg.init, cfg.gamma, cfg.seed)?;
    let params = row_params(cfg);
    let m_obs = m_sigma_observer(cfg)?;
    let coarse = evolve(&u0, &solver(cfg, cfg.dt, cfg.cadence, false), &params, &[&m_obs])?;
    let fine = evolve(&u0, &solver(cfg, 0.5 * cfg.dt, 2 * cfg.cadence, false), &params, &[])?;

    let mut report = ExperimentReport::new("conservation", cfg);
    for (label, t) in [("dt", &coarse), ("dt_half", &fine)] {
        if let Some(reason) = &t.aborted {
            report.errors.push(format!("{label} run aborted: {reason}"));
        }
    }
    let m0 = coarse.rows.first().map(|r| r.mass).unwrap_or(0.0);
    let mass_drift = relative(max_drift(&coarse, |r| r.mass).max(max_drift(&fine, |r| r.mass)), m0);
    let e_coarse = max_drift(&coarse, |r| r.energy);
    let e_fine = max_drift(&fine, |r| r.energy);
    let steps = SolverConfig::new(cfg.nu, cfg.dt, cfg.t_end).steps();
    report.metric("steps", steps);
    report.metric("mass_relative_drift", mass_drift);
    report.metric("energy_drift_dt", e_coarse);
    report.metric("energy_drift_dt_half", e_fine);
    report.verdict("mass_conserved", mass_drift < 1e-10);
    if e_coarse == 0.0 && e_fine == 0.0 {
        report.metric("energy_ratio", serde_json::Value::Null);
        report.verdict("energy_second_order", true);
    } else {
        let ratio = e_coarse / e_fine;
        report.metric("energy_ratio", ratio);
        report.slopes.insert("energy_order".into(), ratio.log2());
        report.verdict("energy_second_order", (3.5..=4.5).contains(&ratio));
    }
    record_interpolation(&mut report, cfg, &coarse, &m_obs)?;
    let mut snapshot = Vec::new();
    if let (Some(f), Some(&t)) = (&coarse.last, coarse.times.last()) {
        write_snapshot(&mut snapshot, f, t)?;
    }
    let files = vec![
        ("conservation_dt.csv".into(), coarse.to_csv()?),
        ("conservation_dt_half.csv".into(), fine.to_csv()?),
    ];
    Ok((Outcome { report, files }, snapshot))
}
