//! Command-line driver for the convergence studies.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 acceptance-threshold failure (with `--check`).
//! `ENVELOPE_LAB_THREADS` caps the per-epsilon worker pool.

use clap::{Args, Parser, Subcommand};
use envelope_lab::studies::single::Route;
use envelope_lab::{
    config::{Format, ProfileConfig, RunConfig},
    emit, studies, LabError,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "envelope-lab",
    about = "Convergence studies for the cubic wave equation and its Schroedinger envelope limit",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Configuration file (JSON or TOML); CLI flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random seed for profile construction.
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated output formats: csv,json,svg.
    #[arg(long)]
    format: Option<String>,
    /// Comma-separated epsilon list, e.g. 0.25,0.125,0.0625.
    #[arg(long)]
    eps: Option<String>,
    /// Profile name: gaussian | sech | tail:<s> | contaminated.
    #[arg(long)]
    profile: Option<String>,
    /// Enforce acceptance thresholds (exit code 4 on failure).
    #[arg(long)]
    check: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Wave-vs-envelope approximation error sweep.
    ConvergeMain(CommonArgs),
    /// Linear propagator convergence sweep.
    ConvergeLinear(CommonArgs),
    /// Remainder decay sweep.
    RemainderDecay(CommonArgs),
    /// High-frequency smallness of the core profile.
    HighfreqCore(CommonArgs),
    /// Resonance kernel quadrature against its stated bound.
    KernelBound(CommonArgs),
    /// Conserved-energy drift along a long run.
    EnergyDrift(CommonArgs),
    /// Sup-norm dispersive decay probe.
    DecayProbe(CommonArgs),
    /// Single run with snapshot dumps.
    Solve {
        #[command(flatten)]
        common: CommonArgs,
        /// Which evolution to run: kg-rescaled | amplitude | nls.
        #[arg(long, default_value = "kg-rescaled")]
        route: String,
    },
}

fn parse_formats(text: &str) -> Result<Vec<Format>, LabError> {
    text.split(',')
        .filter(|s| !s.is_empty())
        .map(|s| match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(LabError::Config(format!("unknown format '{other}'"))),
        })
        .collect()
}

fn parse_eps(text: &str) -> Result<Vec<f64>, LabError> {
    text.split(',')
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| LabError::Config(format!("bad epsilon '{s}'")))
        })
        .collect()
}

fn build_config(common: &CommonArgs) -> Result<RunConfig, LabError> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &common.out {
        cfg.out_dir = out.clone();
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(fmt) = &common.format {
        cfg.formats = parse_formats(fmt)?;
    }
    if let Some(eps) = &common.eps {
        cfg.eps = parse_eps(eps)?;
    }
    if let Some(profile) = &common.profile {
        cfg.profile = ProfileConfig::parse(profile)?;
    }
    cfg.check |= common.check;
    cfg.validate()?;
    Ok(cfg)
}

fn run() -> Result<(), LabError> {
    let cli = Cli::parse();
    match cli.command {
        Command::ConvergeMain(c) => run_report(&c, studies::main_convergence::run),
        Command::ConvergeLinear(c) => run_report(&c, studies::linear::run),
        Command::RemainderDecay(c) => run_report(&c, studies::remainder::run),
        Command::HighfreqCore(c) => run_report(&c, studies::highfreq::run),
        Command::EnergyDrift(c) => run_report(&c, studies::energy::run),
        Command::DecayProbe(c) => run_report(&c, studies::decay::run),
        Command::KernelBound(c) => {
            let cfg = build_config(&c)?;
            let report = studies::kernel::run(&cfg)?;
            emit::emit_kernel_report(&cfg.out_dir, &report, &cfg.formats)?;
            for check in &report.checks {
                println!(
                    "[{}] {}: {}",
                    if check.pass { "pass" } else { "FAIL" },
                    check.name,
                    check.detail
                );
            }
            if cfg.check && !report.checks.iter().all(|c| c.pass) {
                return Err(LabError::CheckFailed("kernel-bound checks failed".into()));
            }
            Ok(())
        }
        Command::Solve { common, route } => {
            let cfg = build_config(&common)?;
            let route = Route::parse(&route)?;
            let path = studies::single::run(&cfg, route)?;
            println!("snapshots written to {}", path.display());
            Ok(())
        }
    }
}

fn run_report(
    common: &CommonArgs,
    study: fn(&RunConfig) -> Result<envelope_lab::ConvergenceReport, LabError>,
) -> Result<(), LabError> {
    let cfg = build_config(common)?;
    let report = study(&cfg)?;
    emit::emit_report(&cfg.out_dir, &report, &cfg.formats)?;
    for f in &report.fits {
        let verdict = match f.pass {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "info",
        };
        let predicted = f
            .prediction
            .as_ref()
            .map(|p| format!(" (predicted {}: {})", p.exponent, p.label))
            .unwrap_or_default();
        println!("[{verdict}] {} slope {:.4} residual {:.2e}{predicted}", f.name, f.slope, f.residual);
    }
    for c in &report.checks {
        println!("[{}] {}: {}", if c.pass { "pass" } else { "FAIL" }, c.name, c.detail);
    }
    for fail in &report.failures {
        println!("[skip] {fail}");
    }
    if cfg.check && !report.all_pass() {
        return Err(LabError::CheckFailed(format!("{} checks failed", report.study)));
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
