//! Command-line driver for the transverse-field Ising ring.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ising_ring::analysis::{demodulate_period_two, dominant_period, first_extremum, Extremum, ExtremumKind};
use ising_ring::model::{delta_l, delta_l_excess, gap_delta, xyz_factorization};
use ising_ring::validate::{default_suite, validate_case, validate_suite, Mutation, ValidationCase, VALIDATION_TOL};
use ising_ring::{run_series, DriverSpec, MagnetizationSample, MomentumGrid, Schedule};

use config::{KickConfig, Params, QuenchConfig, ScanConfig, ValidateConfig, XyzConfig};
use output::{Csv, Sink};

#[derive(Parser, Debug)]
#[command(name = "ising-ring", version, about = "Longitudinal magnetization dynamics of the transverse-field Ising ring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML file with default parameters; command-line flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    params: Params,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Magnetization after a sudden quench of the field to --gf
    Quench,
    /// Magnetization after each kick of a periodically kicked ring
    Kick,
    /// Parity gap Δ(g) over --g-min..--g-max
    Gap,
    /// Chord-length difference Δl(x) over --x-min..--x-max
    Deltal,
    /// Factorization field, angle and ground-state overlap of the XYZ chain
    Xyz,
    /// Compare the Pfaffian engine with exact diagonalization
    Validate {
        #[arg(long, value_enum, default_value_t = MutationArg::None)]
        mutation: MutationArg,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum MutationArg {
    None,
    FlipTerm3,
}

impl From<MutationArg> for Mutation {
    fn from(m: MutationArg) -> Self {
        match m {
            MutationArg::None => Mutation::None,
            MutationArg::FlipTerm3 => Mutation::FlipTerm3,
        }
    }
}

#[derive(Serialize)]
struct Validation {
    tolerance: f64,
    max_dev: f64,
    passed: bool,
}

#[derive(Serialize)]
struct QuenchSummary<'a> {
    command: &'static str,
    config: &'a QuenchConfig,
    samples: usize,
    first_min: Option<Extremum>,
    first_max: Option<Extremum>,
    validation: Option<Validation>,
}

#[derive(Serialize)]
struct KickSummary<'a> {
    command: &'static str,
    config: &'a KickConfig,
    samples: usize,
    envelope_period: Option<f64>,
    validation: Option<Validation>,
}

#[derive(Serialize)]
struct ScanSummary<'a> {
    command: &'static str,
    config: &'a ScanConfig,
    rows: usize,
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// `Ok(false)` signals a completed run whose validation failed.
fn run() -> Result<bool> {
    let cli = Cli::parse();
    let file = match &cli.config {
        Some(path) => Params::load(path)?,
        None => Params::default(),
    };
    let params = file.overlay(cli.params);
    if let Some(threads) = params.threads {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().context("configuring worker threads")?;
    }
    let sink = Sink::new(params.out.clone());
    match cli.command {
        Command::Quench => quench(&QuenchConfig::resolve(&params)?, &sink),
        Command::Kick => kick(&KickConfig::resolve(&params)?, &sink),
        Command::Gap => gap(&ScanConfig::gap(&params)?, &sink),
        Command::Deltal => deltal(&ScanConfig::deltal(&params)?, &sink),
        Command::Xyz => xyz(&XyzConfig::resolve(&params)?, &sink),
        Command::Validate { mutation } => validate(&ValidateConfig::resolve(&params)?, mutation.into(), &sink),
    }
}

fn check_against_ed(case: ValidationCase) -> Result<Validation> {
    anyhow::ensure!(case.n_sites <= 12, "--validate needs N <= 12, got {}", case.n_sites);
    let r = validate_case(&case, Mutation::None)?;
    Ok(Validation { tolerance: VALIDATION_TOL, max_dev: r.max_dev(), passed: r.passed })
}

fn quench(cfg: &QuenchConfig, sink: &Sink) -> Result<bool> {
    let grid = MomentumGrid::new(cfg.n)?;
    let driver = DriverSpec::Quench { g_f: cfg.gf };
    let schedule = Schedule::Times(cfg.times());
    let validation = if cfg.validate {
        Some(check_against_ed(ValidationCase { n_sites: cfg.n, driver, schedule: schedule.clone() })?)
    } else {
        None
    };
    let samples = run_series(&driver, &grid, &schedule)?;
    let nf = cfg.n as f64;
    let mut csv = Csv::new(&["t", "mx_over_n", "my_over_n", "mz_over_n"]);
    for s in &samples {
        csv.row_f64(&[s.time, s.mx / nf, s.my / nf, s.mz / nf]);
    }
    sink.write_csv(&csv)?;
    let times: Vec<f64> = samples.iter().map(|s| s.time).collect();
    let mx = scaled(&samples, nf, |s| s.mx);
    let ok = validation.as_ref().map_or(true, |v| v.passed);
    sink.write_summary(&QuenchSummary {
        command: "quench",
        config: cfg,
        samples: samples.len(),
        first_min: first_extremum(&times, &mx, ExtremumKind::Min, cfg.prominence),
        first_max: first_extremum(&times, &mx, ExtremumKind::Max, cfg.prominence),
        validation,
    })?;
    Ok(ok)
}

fn kick(cfg: &KickConfig, sink: &Sink) -> Result<bool> {
    let grid = MomentumGrid::new(cfg.n)?;
    let driver = DriverSpec::Kick { g: cfg.g, tau: cfg.tau, epsilon: cfg.epsilon };
    let schedule = Schedule::Kicks((1..=cfg.kicks).collect());
    let validation = if cfg.validate {
        Some(check_against_ed(ValidationCase { n_sites: cfg.n, driver, schedule: schedule.clone() })?)
    } else {
        None
    };
    let samples = run_series(&driver, &grid, &schedule)?;
    let nf = cfg.n as f64;
    let mut csv = Csv::new(&["n", "mx_over_n", "mz_over_n"]);
    for (i, s) in samples.iter().enumerate() {
        csv.row(i + 1, &[s.mx / nf, s.mz / nf]);
    }
    sink.write_csv(&csv)?;
    let mx = scaled(&samples, nf, |s| s.mx);
    let ok = validation.as_ref().map_or(true, |v| v.passed);
    sink.write_summary(&KickSummary {
        command: "kick",
        config: cfg,
        samples: samples.len(),
        envelope_period: dominant_period(&demodulate_period_two(&mx, 1), 16),
        validation,
    })?;
    Ok(ok)
}

fn scaled(samples: &[MagnetizationSample], nf: f64, f: impl Fn(&MagnetizationSample) -> f64) -> Vec<f64> {
    samples.iter().map(|s| f(s) / nf).collect()
}

fn gap(cfg: &ScanConfig, sink: &Sink) -> Result<bool> {
    let grid = MomentumGrid::new(cfg.n)?;
    let mut csv = Csv::new(&["g", "delta"]);
    for g in cfg.points() {
        csv.row_f64(&[g, gap_delta(&grid, g)?]);
    }
    sink.write_csv(&csv)?;
    sink.write_summary(&ScanSummary { command: "gap", config: cfg, rows: cfg.steps })?;
    Ok(true)
}

fn deltal(cfg: &ScanConfig, sink: &Sink) -> Result<bool> {
    let mut csv = Csv::new(&["x", "delta_l", "excess"]);
    for x in cfg.points() {
        csv.row_f64(&[x, delta_l(x, cfg.n)?, delta_l_excess(x, cfg.n)?]);
    }
    sink.write_csv(&csv)?;
    sink.write_summary(&ScanSummary { command: "deltal", config: cfg, rows: cfg.steps })?;
    Ok(true)
}

fn xyz(cfg: &XyzConfig, sink: &Sink) -> Result<bool> {
    let f = xyz_factorization(cfg.jx, cfg.jy, cfg.jz, cfg.n)?;
    let mut csv = Csv::new(&["h_star", "beta_star", "overlap"]);
    csv.row_f64(&[f.h_star, f.beta_star, f.overlap]);
    sink.write_csv(&csv)?;
    #[derive(Serialize)]
    struct XyzSummary<'a> {
        command: &'static str,
        config: &'a XyzConfig,
        result: ising_ring::model::XyzFactorization,
    }
    sink.write_summary(&XyzSummary { command: "xyz", config: cfg, result: f })?;
    Ok(true)
}

fn validate(cfg: &ValidateConfig, mutation: Mutation, sink: &Sink) -> Result<bool> {
    let report = validate_suite(&default_suite(&cfg.sizes), mutation)?;
    for c in report.failures() {
        eprintln!("FAIL {}: max deviation {:.3e} (a_to_b {:.3e}, b_to_a {:.3e})", c.label, c.max_dev(), c.terms.a_to_b, c.terms.b_to_a);
    }
    sink.write_text(&serde_json::to_string_pretty(&report)?)?;
    Ok(report.passed)
}
