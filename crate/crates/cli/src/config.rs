//! Run parameters from flags and an optional TOML file.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::{Deserialize, Serialize};

/// Every tunable of every command. Flags override values read from
/// `--config`; anything still unset falls back to the command default.
#[derive(Args, Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Ring size (even, at least 4)
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Transverse field (kick protocol field for `kick`)
    #[arg(long, global = true)]
    pub g: Option<f64>,
    /// Post-quench field
    #[arg(long, global = true)]
    pub gf: Option<f64>,
    /// Last sample time of a quench
    #[arg(long, global = true)]
    pub tmax: Option<f64>,
    /// Sampling interval of a quench
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    /// Free evolution time between kicks
    #[arg(long, global = true)]
    pub tau: Option<f64>,
    /// Kick angle deficit, the kick rotates by π(1 - ε)
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// Number of kicks
    #[arg(long, global = true)]
    pub kicks: Option<usize>,
    /// CSV output path; the summary goes next to it with a `.json` extension
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (0 = one per core)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Compare against exact diagonalization (N <= 12)
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pub validate: Option<bool>,
    #[arg(long, global = true)]
    pub g_min: Option<f64>,
    #[arg(long, global = true)]
    pub g_max: Option<f64>,
    #[arg(long, global = true)]
    pub g_steps: Option<usize>,
    #[arg(long, global = true)]
    pub x_min: Option<f64>,
    #[arg(long, global = true)]
    pub x_max: Option<f64>,
    #[arg(long, global = true)]
    pub x_steps: Option<usize>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub jx: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub jy: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub jz: Option<f64>,
    /// Ring sizes for `validate`, comma separated
    #[arg(long, global = true, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// Minimum prominence (in M/N) of a reported extremum
    #[arg(long, global = true)]
    pub prominence: Option<f64>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($f:ident),*) => {
        Params { $($f: $top.$f.or($base.$f)),* }
    };
}

impl Params {
    pub fn load(path: &Path) -> Result<Params> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// `top` wins wherever it is set.
    pub fn overlay(self, top: Params) -> Params {
        overlay!(
            self, top, n, g, gf, tmax, dt, tau, epsilon, kicks, out, threads, validate, g_min, g_max, g_steps, x_min, x_max, x_steps, jx,
            jy, jz, sizes, prominence
        )
    }
}

fn ring(n: usize) -> Result<usize> {
    if n < 4 || n % 2 != 0 {
        bail!("--n must be even and at least 4, got {n}");
    }
    Ok(n)
}

fn field(name: &str, g: f64) -> Result<f64> {
    if !(g.is_finite() && g >= 0.0) {
        bail!("--{name} must be a finite non-negative field, got {g}");
    }
    Ok(g)
}

fn range(name: &str, lo: f64, hi: f64, steps: usize) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        bail!("--{name}-min/--{name}-max must satisfy min <= max, got [{lo}, {hi}]");
    }
    if steps < 1 || (steps == 1 && lo != hi) {
        bail!("--{name}-steps must be at least 2 for a non-empty range");
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuenchConfig {
    pub n: usize,
    pub gf: f64,
    pub tmax: f64,
    pub dt: f64,
    pub validate: bool,
    pub prominence: f64,
}

impl QuenchConfig {
    pub fn resolve(p: &Params) -> Result<Self> {
        let dt = p.dt.unwrap_or(0.1);
        let tmax = p.tmax.unwrap_or(40.0);
        if !(dt.is_finite() && dt > 0.0) {
            bail!("--dt must be positive, got {dt}");
        }
        if !(tmax.is_finite() && tmax >= 0.0) {
            bail!("--tmax must be non-negative, got {tmax}");
        }
        Ok(Self {
            n: ring(p.n.unwrap_or(30))?,
            gf: field("gf", p.gf.or(p.g).unwrap_or(0.5))?,
            tmax,
            dt,
            validate: p.validate.unwrap_or(false),
            prominence: p.prominence.unwrap_or(ising_ring::analysis::DEFAULT_PROMINENCE),
        })
    }

    pub fn times(&self) -> Vec<f64> {
        let steps = (self.tmax / self.dt + 1e-9).floor() as usize;
        (0..=steps).map(|i| i as f64 * self.dt).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KickConfig {
    pub n: usize,
    pub g: f64,
    pub tau: f64,
    pub epsilon: f64,
    pub kicks: usize,
    pub validate: bool,
}

impl KickConfig {
    pub fn resolve(p: &Params) -> Result<Self> {
        let kicks = p.kicks.unwrap_or(400);
        if kicks < 1 {
            bail!("--kicks must be at least 1");
        }
        let tau = p.tau.unwrap_or(0.5);
        let epsilon = p.epsilon.unwrap_or(0.02);
        if !(tau.is_finite() && tau >= 0.0) || !epsilon.is_finite() {
            bail!("--tau must be non-negative and --epsilon finite");
        }
        Ok(Self { n: ring(p.n.unwrap_or(40))?, g: field("g", p.g.unwrap_or(0.5))?, tau, epsilon, kicks, validate: p.validate.unwrap_or(false) })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanConfig {
    pub n: usize,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl ScanConfig {
    pub fn gap(p: &Params) -> Result<Self> {
        let s = Self { n: ring(p.n.unwrap_or(50))?, min: p.g_min.unwrap_or(0.0), max: p.g_max.unwrap_or(2.0), steps: p.g_steps.unwrap_or(201) };
        range("g", s.min, s.max, s.steps)?;
        field("g-min", s.min)?;
        Ok(s)
    }

    pub fn deltal(p: &Params) -> Result<Self> {
        let s = Self { n: ring(p.n.unwrap_or(16))?, min: p.x_min.unwrap_or(0.01), max: p.x_max.unwrap_or(3.0), steps: p.x_steps.unwrap_or(300) };
        range("x", s.min, s.max, s.steps)?;
        field("x-min", s.min)?;
        Ok(s)
    }

    /// `steps` evenly spaced points including both ends.
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        (0..self.steps).map(|i| self.min + (self.max - self.min) * i as f64 / (self.steps - 1) as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XyzConfig {
    pub n: usize,
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
}

impl XyzConfig {
    pub fn resolve(p: &Params) -> Result<Self> {
        let (Some(jx), Some(jy), Some(jz)) = (p.jx, p.jy, p.jz) else {
            bail!("xyz needs --jx, --jy and --jz");
        };
        let n = p.n.unwrap_or(8);
        if n == 0 {
            bail!("--n must be positive");
        }
        Ok(Self { n, jx, jy, jz })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidateConfig {
    pub sizes: Vec<usize>,
}

impl ValidateConfig {
    pub fn resolve(p: &Params) -> Result<Self> {
        let sizes = p.sizes.clone().or(p.n.map(|n| vec![n])).unwrap_or_else(|| vec![4, 6, 8, 10]);
        for &n in &sizes {
            if n < 4 || n > 12 || n % 2 != 0 {
                bail!("validation supports even ring sizes 4..=12, got {n}");
            }
        }
        Ok(Self { sizes })
    }
}
