use serde::Serialize;

/// Admissibility verdict for a space-time exponent pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairVerdict {
    pub p: f64,
    pub q: f64,
    pub gamma_pq: f64,
    pub schrodinger_admissible: bool,
    pub biharmonic_admissible: bool,
}

const TOL: f64 = 1e-12;

/// `γ_{p,q} = d/2 - d/q - 4/p`; infinite exponents contribute zero.
pub fn gamma_pq(p: f64, q: f64, d: u32) -> f64 {
    let df = d as f64;
    df / 2.0 - df / q - 4.0 / p
}

/// `(p, q) ∈ [2, ∞]²`, `(p, q, d) ≠ (2, ∞, 2)` and `2/p + d/q ≤ d/2`.
pub fn schrodinger_admissible(p: f64, q: f64, d: u32) -> bool {
    let df = d as f64;
    let in_range = p >= 2.0 - TOL && q >= 2.0 - TOL;
    let forbidden = d == 2 && (p - 2.0).abs() <= TOL && q.is_infinite();
    in_range && !forbidden && 2.0 / p + df / q <= df / 2.0 + TOL
}

pub fn admissibility(p: f64, q: f64, d: u32) -> PairVerdict {
    let g = gamma_pq(p, q, d);
    let schrodinger = schrodinger_admissible(p, q, d);
    PairVerdict {
        p,
        q,
        gamma_pq: g,
        schrodinger_admissible: schrodinger,
        biharmonic_admissible: schrodinger && g.abs() <= TOL,
    }
}
