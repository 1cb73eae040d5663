use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use bihnls::experiments::{
    run_almost_conservation_sweep, run_conservation, run_operator_suite, run_scattering, run_table1,
    ExperimentConfig, Outcome, Preset, TABLE1,
};
use bihnls::exponents::ExponentReport;
use bihnls::spectral::{symbol_csv, MultiplierSpec};
use clap::{Args, Parser, Subcommand};

/// Simulator, diagnostics and exponent calculator for the defocusing
/// fourth-order NLS  i u_t + Δ²u = -|u|^(ν-1) u.
#[derive(Parser)]
#[command(name = "bihnls", version, arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// JSON config; the recipe's reference config is used when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dotted override applied before validation, e.g. --set init.bumps=4
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory (defaults to the config's output_dir)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the full exponent report for (d, ν) as JSON
    Exponents {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        nu: f64,
        /// Regularity for the γ-dependent entries
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Reproduce the threshold table as CSV
    Table1 {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evolve a seeded datum at dt and dt/2; check mass and energy conservation
    Simulate(RunArgs),
    /// Almost-conservation sweep over the cutoffs in n_list
    Sweep(RunArgs),
    /// Littlewood-Paley, Bernstein and smoothing-operator checks
    VerifyOps(RunArgs),
    /// Scattering residuals over dyadic time pairs
    Scatter(RunArgs),
    /// Sample a radial multiplier symbol as CSV (rho,value)
    ExportSymbol {
        /// Multiplier as JSON, e.g. '{"kind":"i_smoothing","cutoff":8,"gamma":1.5}'
        #[arg(long)]
        symbol: String,
        #[arg(long, default_value_t = 64.0)]
        rho_max: f64,
        #[arg(long, default_value_t = 513)]
        samples: usize,
        /// Output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(run: &RunArgs, preset: Preset) -> Result<ExperimentConfig> {
    let cfg = match &run.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            ExperimentConfig::from_json(&text, &run.overrides)
        }
        None => ExperimentConfig::preset(preset, &run.overrides),
    };
    Ok(cfg?)
}

fn out_dir(run: &RunArgs, cfg: &ExperimentConfig) -> PathBuf {
    run.out.clone().unwrap_or_else(|| cfg.output_dir.clone())
}

fn finish(outcome: &Outcome, dir: &Path) -> Result<bool> {
    for path in outcome.persist(dir)? {
        eprintln!("wrote {}", path.display());
    }
    println!("{}", serde_json::to_string_pretty(&outcome.report.to_json())?);
    Ok(outcome.report.passed())
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Exponents { d, nu, gamma } => {
            let report = ExponentReport::build(d, nu, gamma)?;
            println!("{}", serde_json::to_string_pretty(&report.to_json())?);
            Ok(true)
        }
        Command::Table1 { out } => {
            let cfg = Preset::Table1.config();
            let outcome = run_table1(&cfg, &TABLE1)?;
            print!("{}", outcome.files[0].1);
            if let Some(dir) = out {
                for path in outcome.persist(&dir)? {
                    eprintln!("wrote {}", path.display());
                }
            }
            Ok(outcome.report.passed())
        }
        Command::Simulate(run) => {
            let cfg = load(&run, Preset::Conservation)?;
            let (outcome, snapshot) = run_conservation(&cfg)?;
            let dir = out_dir(&run, &cfg);
            let pass = finish(&outcome, &dir)?;
            if !snapshot.is_empty() {
                let path = dir.join("final.bin");
                fs::write(&path, snapshot).with_context(|| format!("writing {}", path.display()))?;
                eprintln!("wrote {}", path.display());
            }
            Ok(pass)
        }
        Command::Sweep(run) => {
            let cfg = load(&run, Preset::Sweep)?;
            let (outcome, _) = run_almost_conservation_sweep(&cfg)?;
            finish(&outcome, &out_dir(&run, &cfg))
        }
        Command::VerifyOps(run) => {
            let cfg = load(&run, Preset::Operators)?;
            finish(&run_operator_suite(&cfg)?, &out_dir(&run, &cfg))
        }
        Command::Scatter(run) => {
            let cfg = load(&run, Preset::Scattering)?;
            let (outcome, _) = run_scattering(&cfg)?;
            finish(&outcome, &out_dir(&run, &cfg))
        }
        Command::ExportSymbol { symbol, rho_max, samples, out } => {
            let spec: MultiplierSpec = serde_json::from_str(&symbol).context("parsing --symbol")?;
            let csv = symbol_csv(&spec, rho_max, samples)?;
            match out {
                Some(path) => {
                    fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
                    eprintln!("wrote {}", path.display());
                }
                None => print!("{csv}"),
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verdict: FAIL");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
