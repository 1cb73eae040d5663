//! Reproducible experiment recipes. Every recipe is a pure function of an
//! [`ExperimentConfig`] returning an [`Outcome`]; writing files is a separate step.

mod conservation;
mod data;
mod operators;
mod scattering;
mod sweep;
mod table1;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::diagnostics::DiagnosticsError;
use crate::dynamics::DynamicsError;
use crate::exponents::{check_theorem_window, delta_max, gamma_threshold, ExponentError};
use crate::spectral::{Grid, SpectralError};

pub use conservation::run_conservation;
pub use data::{balanced_field, gaussian_bumps, InitialData};
pub use operators::run_operator_suite;
pub use scattering::{dyadic_times, run_scattering};
pub use sweep::{fit_line, run_almost_conservation_sweep, sweep_verdict, SweepResult, SweepVerdict};
pub use table1::{run_table1, Table1Row, TABLE1, TABLE1_TOLERANCE};

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error(transparent)]
    Exponent(#[from] ExponentError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// A single JSON document describing one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub name: String,
    /// Dimension of the simulation grid.
    pub d: usize,
    pub n: usize,
    pub ell: f64,
    pub nu: f64,
    pub gamma: f64,
    pub sigma: f64,
    pub dt: f64,
    pub t_end: f64,
    /// Diagnostics are sampled every `cadence` steps.
    pub cadence: usize,
    /// Dyadic cutoffs `N` of the smoothing operator.
    pub n_list: Vec<f64>,
    /// Smallness threshold for the monitored `M^σ` norm.
    pub mu: f64,
    /// Decay margin; defaults to `0.9·δ_max` when that is positive, else 0.
    pub delta: Option<f64>,
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Dimension used for the exponent bookkeeping (`Γc`, `M^σ`, Morawetz weight).
    /// The grid may be a lower-dimensional surrogate.
    pub theory_d: u32,
    pub init: InitialData,
    /// Number of dyadic time pairs in the scattering recipe.
    pub dyadic_levels: usize,
    /// Overrides the point budget of the environment.
    pub point_budget: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            name: "experiment".into(),
            d: 1,
            n: 256,
            ell: 30.0,
            nu: 3.0,
            gamma: 1.5,
            sigma: 0.5,
            dt: 1e-3,
            t_end: 1.0,
            cadence: 10,
            n_list: vec![8.0, 16.0, 32.0, 64.0],
            mu: 0.1,
            delta: None,
            seed: 0,
            output_dir: PathBuf::from("out"),
            theory_d: 5,
            init: InitialData::default(),
            dyadic_levels: 6,
            point_budget: None,
        }
    }
}

/// Reference configurations, one per recipe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Conservation,
    Sweep,
    SweepHeavy,
    Operators,
    Scattering,
    Table1,
}

impl Preset {
    pub const ALL: [Preset; 6] =
        [Preset::Conservation, Preset::Sweep, Preset::SweepHeavy, Preset::Operators, Preset::Scattering, Preset::Table1];

    /// File name of the shipped copy under `configs/`.
    pub fn file_name(self) -> &'static str {
        match self {
            Preset::Conservation => "conservation.json",
            Preset::Sweep => "sweep.json",
            Preset::SweepHeavy => "sweep_heavy.json",
            Preset::Operators => "operators.json",
            Preset::Scattering => "scattering.json",
            Preset::Table1 => "table1.json",
        }
    }

    pub fn config(self) -> ExperimentConfig {
        let mut cfg = self.base();
        cfg.output_dir = PathBuf::from("out").join(&cfg.name);
        cfg
    }

    fn base(self) -> ExperimentConfig {
        let base = ExperimentConfig::default();
        match self {
            Preset::Conservation => ExperimentConfig {
                name: "conservation".into(),
                init: InitialData { bumps: 2, width_min: 1.0, width_max: 2.0, norm: 2.0, ..InitialData::default() },
                ..base
            },
            Preset::Sweep => ExperimentConfig {
                name: "sweep".into(),
                n: 512,
                ell: 2.0 * std::f64::consts::PI,
                dt: 1e-8,
                t_end: 1e-4,
                cadence: 10,
                seed: 1,
                init: InitialData {
                    bumps: 12,
                    width_min: 0.01,
                    width_max: 0.5,
                    profile: 1.5,
                    band: Some(170.0),
                    norm: 1.0,
                },
                ..base
            },
            Preset::SweepHeavy => ExperimentConfig {
                name: "sweep_heavy".into(),
                d: 5,
                n: 16,
                ell: 2.0 * std::f64::consts::PI,
                dt: 1e-5,
                t_end: 1e-3,
                cadence: 5,
                n_list: vec![2.0, 4.0],
                seed: 1,
                init: InitialData {
                    bumps: 6,
                    width_min: 0.1,
                    width_max: 1.0,
                    profile: 1.5,
                    band: None,
                    norm: 1.0,
                },
                ..base
            },
            Preset::Operators => ExperimentConfig {
                name: "operators".into(),
                n: 1024,
                ell: 2.0 * std::f64::consts::PI,
                n_list: vec![4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0],
                seed: 7,
                ..base
            },
            Preset::Scattering => ExperimentConfig {
                name: "scattering".into(),
                n: 2048,
                ell: 400.0,
                nu: 9.0,
                dt: 1e-3,
                t_end: 16.0,
                cadence: 250,
                n_list: vec![8.0],
                init: InitialData { bumps: 1, width_min: 1.0, width_max: 1.0, norm: 1.0, ..InitialData::default() },
                ..base
            },
            Preset::Table1 => ExperimentConfig { name: "table1".into(), ..base },
        }
    }
}

fn parse_override(raw: &str) -> Result<(Vec<&str>, Value), ExperimentError> {
    let (key, value) =
        raw.split_once('=').ok_or_else(|| ExperimentError::Config(format!("override `{raw}` is not key=value")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(ExperimentError::Config(format!("bad override key `{key}`")));
    }
    let value = serde_json::from_str(value.trim()).unwrap_or_else(|_| Value::String(value.trim().to_string()));
    Ok((path, value))
}

/// Sets `a.b.c=value` inside a JSON document. The value is parsed as JSON when
/// possible and taken as a string otherwise.
pub fn apply_override(doc: &mut Value, raw: &str) -> Result<(), ExperimentError> {
    let (path, value) = parse_override(raw)?;
    let mut node = doc;
    for (i, key) in path.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| ExperimentError::Config(format!("`{}` is not an object", path[..i].join("."))))?;
        if i + 1 == path.len() {
            obj.insert(key.to_string(), value);
            return Ok(());
        }
        node = obj.entry(key.to_string()).or_insert_with(|| Value::Object(Default::default()));
        if node.is_null() {
            *node = Value::Object(Default::default());
        }
    }
    unreachable!("override path is never empty")
}

impl ExperimentConfig {
    /// Parses a config document, applying overrides before validation.
    pub fn from_value(mut doc: Value, overrides: &[String]) -> Result<Self, ExperimentError> {
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let cfg: Self = serde_json::from_value(doc).map_err(|e| ExperimentError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str, overrides: &[String]) -> Result<Self, ExperimentError> {
        let doc = serde_json::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))?;
        Self::from_value(doc, overrides)
    }

    /// A preset with overrides applied.
    pub fn preset(preset: Preset, overrides: &[String]) -> Result<Self, ExperimentError> {
        let doc = serde_json::to_value(preset.config()).expect("config serializes");
        Self::from_value(doc, overrides)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: String| Err(ExperimentError::Config(m));
        self.grid()?;
        if !(self.nu > 1.0 && self.nu.is_finite()) {
            return bad(format!("nu must exceed 1, got {}", self.nu));
        }
        if !(0.0..2.0).contains(&self.gamma) {
            return bad(format!("gamma must lie in [0, 2), got {}", self.gamma));
        }
        if !(self.sigma > 0.0) {
            return bad(format!("sigma must be positive, got {}", self.sigma));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end must be non-negative, got {}", self.t_end));
        }
        if self.cadence == 0 {
            return bad("cadence must be at least 1".into());
        }
        if self.n_list.is_empty() {
            return bad("n_list must not be empty".into());
        }
        if let Some(&m) = self.n_list.iter().find(|&&m| !crate::spectral::is_dyadic(m)) {
            return bad(format!("n_list entry {m} is not a power of two"));
        }
        if self.n_list.windows(2).any(|w| !(w[1] > w[0])) {
            return bad("n_list must be strictly increasing".into());
        }
        if !(self.mu > 0.0) {
            return bad(format!("mu must be positive, got {}", self.mu));
        }
        if !(self.theory_d >= 1) {
            return bad("theory_d must be at least 1".into());
        }
        if let Some(delta) = self.delta {
            let cap = self.delta_cap();
            if !(delta >= 0.0 && delta <= cap * (1.0 + 1e-12)) {
                return bad(format!("delta must lie in [0, {cap}] (0.9 delta_max), got {delta}"));
            }
        }
        self.init.validate()?;
        Ok(())
    }

    fn delta_cap(&self) -> f64 {
        delta_max(self.theory_d, self.nu, self.gamma).map(|m| (0.9 * m).max(0.0)).unwrap_or(0.0)
    }

    pub fn delta(&self) -> f64 {
        self.delta.unwrap_or_else(|| self.delta_cap())
    }

    pub fn grid(&self) -> Result<Grid, ExperimentError> {
        Ok(match self.point_budget {
            Some(b) => Grid::with_budget(self.d, self.n, self.ell, b)?,
            None => Grid::from_env(self.d, self.n, self.ell)?,
        })
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(canonical.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Whether the run sits inside the theorem's hypotheses, or why it is a surrogate.
    pub fn hypothesis(&self) -> String {
        let mut reasons = Vec::new();
        if self.d as u32 != self.theory_d {
            reasons.push(format!("grid dimension {} differs from theory dimension {}", self.d, self.theory_d));
        }
        if let Err(e) = check_theorem_window(self.theory_d, self.nu) {
            reasons.push(e.to_string());
        } else if let Ok(r) = gamma_threshold(self.theory_d, self.nu) {
            if self.gamma <= r.gamma_threshold {
                reasons.push(format!("gamma {} is not above the threshold {:.6}", self.gamma, r.gamma_threshold));
            }
        }
        if self.delta_cap() <= 0.0 {
            reasons.push("delta_max is not positive".into());
        }
        if reasons.is_empty() {
            "within hypothesis".into()
        } else {
            format!("surrogate: {}", reasons.join("; "))
        }
    }
}

/// Summary of one recipe run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config_hash: String,
    pub hypothesis: String,
    pub verdicts: BTreeMap<String, bool>,
    pub slopes: BTreeMap<String, f64>,
    pub metrics: BTreeMap<String, Value>,
    pub errors: Vec<String>,
}

impl ExperimentReport {
    pub fn new(experiment: &str, cfg: &ExperimentConfig) -> Self {
        Self {
            experiment: experiment.into(),
            config_hash: cfg.hash(),
            hypothesis: cfg.hypothesis(),
            verdicts: BTreeMap::new(),
            slopes: BTreeMap::new(),
            metrics: BTreeMap::new(),
            errors: Vec::new(),
        }
    }

    pub fn verdict(&mut self, name: &str, pass: bool) {
        self.verdicts.insert(name.into(), pass);
    }

    pub fn metric(&mut self, name: &str, value: impl Into<Value>) {
        self.metrics.insert(name.into(), value.into());
    }

    pub fn passed(&self) -> bool {
        self.errors.is_empty() && self.verdicts.values().all(|&v| v)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// A report plus the files it produced, as `(file name, contents)`.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: ExperimentReport,
    pub files: Vec<(String, String)>,
}

impl Outcome {
    /// Writes every file and `summary.json` into `dir`, returning the paths written.
    pub fn persist(&self, dir: &Path) -> Result<Vec<PathBuf>, ExperimentError> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| ExperimentError::Io { path, source }
        };
        fs::create_dir_all(dir).map_err(io(dir))?;
        let mut written = Vec::new();
        let summary = serde_json::to_string_pretty(&self.report.to_json()).expect("report serializes") + "\n";
        for (name, contents) in self.files.iter().map(|(n, c)| (n.as_str(), c.as_str())).chain([("summary.json", summary.as_str())])
        {
            let path = dir.join(name);
            fs::write(&path, contents).map_err(io(&path))?;
            written.push(path);
        }
        Ok(written)
    }
}
