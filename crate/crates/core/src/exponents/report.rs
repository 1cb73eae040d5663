use serde::Serialize;
use serde_json::{json, Value};

use super::{
    critical_exponent, delta_max, epsilon_of, gamma123, gamma4, scattering_exponents, theta, ExponentError, Gamma4,
};

/// Every scalar exponent for one `(d, ν)`, evaluated at regularity `gamma`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentReport {
    pub d: u32,
    pub nu: f64,
    /// Regularity at which the γ-dependent entries are evaluated.
    pub gamma: f64,
    pub gamma_c: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub gamma4: f64,
    pub gamma_threshold: f64,
    pub sigma_star: f64,
    pub sigma0_max: f64,
    /// `None` when θ falls outside `(0, 1)` at `sigma_star`.
    pub theta: Option<f64>,
    /// `f64::INFINITY` at the ε = ∞ endpoint; `None` outside the hypothesis.
    pub epsilon: Option<f64>,
    pub delta_max: f64,
    /// Small-ε limits of the scattering exponents; `None` outside their hypothesis.
    pub alpha_eps: Option<f64>,
    pub beta_eps: Option<f64>,
    pub root_residual: f64,
    pub sigma_monotone: bool,
    pub degenerate_sigma_window: bool,
    pub multiple_roots: bool,
}

impl ExponentReport {
    /// Builds the report; `gamma` defaults to the midpoint of `(γ(d,ν), 2)`.
    pub fn build(d: u32, nu: f64, gamma: Option<f64>) -> Result<Self, ExponentError> {
        let gamma_c = critical_exponent(d, nu)?;
        let (gamma1, gamma2, gamma3) = gamma123(d, nu)?;
        let g4: Gamma4 = gamma4(d, nu)?;
        let gamma_threshold = gamma1.max(gamma2).max(gamma3).max(g4.gamma4);
        let gamma = gamma.unwrap_or(0.5 * (gamma_threshold + 2.0));
        let sigma = g4.sigma_star;
        let scattering = if sigma > 0.0 {
            scattering_exponents(d, gamma, sigma, nu, 0.0).ok()
        } else {
            None
        };
        Ok(Self {
            d,
            nu,
            gamma,
            gamma_c,
            gamma1,
            gamma2,
            gamma3,
            gamma4: g4.gamma4,
            gamma_threshold,
            sigma_star: sigma,
            sigma0_max: g4.sigma0,
            theta: theta(d, nu, sigma).ok(),
            epsilon: epsilon_of(d, nu, sigma).ok(),
            delta_max: delta_max(d, nu, gamma)?,
            alpha_eps: scattering.map(|s| s.alpha),
            beta_eps: scattering.map(|s| s.beta),
            root_residual: g4.residual,
            sigma_monotone: g4.sigma_monotone,
            degenerate_sigma_window: g4.degenerate_window,
            multiple_roots: g4.multiple_roots,
        })
    }

    /// The external JSON form. Infinite values are written as the string `"inf"`,
    /// undefined ones as `null`.
    pub fn to_json(&self) -> Value {
        json!({
            "d": self.d,
            "nu": self.nu,
            "gamma_c": self.gamma_c,
            "gamma1": self.gamma1,
            "gamma2": self.gamma2,
            "gamma3": self.gamma3,
            "gamma4": self.gamma4,
            "gamma_threshold": self.gamma_threshold,
            "sigma_star": self.sigma_star,
            "sigma0_max": self.sigma0_max,
            "theta": self.theta.map(number),
            "epsilon": self.epsilon.map(number),
            "delta_max": self.delta_max,
            "root_residual": self.root_residual,
        })
    }
}

fn number(x: f64) -> Value {
    if x.is_infinite() {
        Value::String(if x > 0.0 { "inf" } else { "-inf" }.into())
    } else {
        json!(x)
    }
}

/// `γ(d, ν) = max{γ₁, γ₂, γ₃, γ₄}` with the full report.
pub fn gamma_threshold(d: u32, nu: f64) -> Result<ExponentReport, ExponentError> {
    ExponentReport::build(d, nu, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_has_exactly_the_documented_keys() {
        let r = ExponentReport::build(5, 3.0, None).unwrap();
        let v = r.to_json();
        let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        keys.sort();
        let mut want = vec![
            "d", "nu", "gamma_c", "gamma1", "gamma2", "gamma3", "gamma4", "gamma_threshold", "sigma_star",
            "sigma0_max", "theta", "epsilon", "delta_max", "root_residual",
        ];
        want.sort();
        assert_eq!(keys, want);
        assert_eq!(v["epsilon"], "inf");
    }

    #[test]
    fn threshold_is_max_of_candidates() {
        for (d, nu) in [(5, 3.0), (6, 3.0), (7, 3.0), (5, 4.0), (6, 4.0), (8, 2.5)] {
            let r = gamma_threshold(d, nu).unwrap();
            let max = r.gamma1.max(r.gamma2).max(r.gamma3).max(r.gamma4);
            assert_eq!(r.gamma_threshold, max);
            for g in [r.gamma1, r.gamma2, r.gamma3, r.gamma4] {
                assert!(r.gamma_threshold >= g);
            }
        }
    }

    #[test]
    fn degenerate_row_is_flagged() {
        let r = gamma_threshold(5, 4.0).unwrap();
        assert!(r.degenerate_sigma_window);
        assert_eq!(r.sigma_star, 0.0);
        assert!(r.theta.is_none());
    }
}
