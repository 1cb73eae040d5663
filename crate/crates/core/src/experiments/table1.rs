use std::fmt::Write as _;

use num_rational::Ratio;

use super::{ExperimentConfig, ExperimentError, ExperimentReport, Outcome};
use crate::exponents::{critical_exponent_exact, gamma_threshold};

/// One published row: dimension, integer exponent, `Γc` as a reduced fraction, threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table1Row {
    pub d: u32,
    pub nu: i64,
    pub gamma_c: (i64, i64),
    pub published: f64,
}

pub const TABLE1: [Table1Row; 5] = [
    Table1Row { d: 5, nu: 3, gamma_c: (1, 2), published: 1.6711 },
    Table1Row { d: 6, nu: 3, gamma_c: (1, 1), published: 1.8719 },
    Table1Row { d: 7, nu: 3, gamma_c: (3, 2), published: 1.9665 },
    Table1Row { d: 5, nu: 4, gamma_c: (7, 6), published: 1.9257 },
    Table1Row { d: 6, nu: 4, gamma_c: (5, 3), published: 1.9922 },
];

pub const TABLE1_TOLERANCE: f64 = 2e-3;

/// CSV with columns `nu,d,gamma_c,paper_value,computed,abs_error`.
pub fn run_table1(cfg: &ExperimentConfig, rows: &[Table1Row]) -> Result<Outcome, ExperimentError> {
    let mut report = ExperimentReport::new("table1", cfg);
    let mut csv = String::from("nu,d,gamma_c,paper_value,computed,abs_error\n");
    let mut within = true;
    let mut exact = true;
    let mut worst = 0.0f64;
    for row in rows {
        let gc = critical_exponent_exact(row.d, row.nu)?;
        exact &= gc == Ratio::new(row.gamma_c.0, row.gamma_c.1);
        let computed = gamma_threshold(row.d, row.nu as f64)?.gamma_threshold;
        let err = (computed - row.published).abs();
        within &= err <= TABLE1_TOLERANCE;
        worst = worst.max(err);
        writeln!(csv, "{},{},{},{},{},{}", row.nu, row.d, gc, row.published, computed, err)
            .expect("writing to a String cannot fail");
    }
    report.verdict("thresholds_within_tolerance", within);
    report.verdict("gamma_c_exact", exact);
    report.metric("max_abs_error", worst);
    report.metric("tolerance", TABLE1_TOLERANCE);
    Ok(Outcome { report, files: vec![("table1.csv".into(), csv)] })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_shape() {
        let out = run_table1(&ExperimentConfig::default(), &TABLE1).unwrap();
        let csv = &out.files[0].1;
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "nu,d,gamma_c,paper_value,computed,abs_error");
        assert_eq!(lines.len(), 6);
        assert!(lines[1].starts_with("3,5,1/2,1.6711,"));
        assert!(lines[2].starts_with("3,6,1,"));
        assert!(out.report.passed());
    }
}
