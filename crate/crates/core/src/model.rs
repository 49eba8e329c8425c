//! Static structure of the periodic transverse-field Ising ring.
//!
//! Momenta are kept as integers: a mode is `k = m·π/N` with `m` odd in the
//! even-parity sector (antiperiodic fermions) and `m` even in the
//! odd-parity sector (periodic fermions), `m ∈ [-N, N)`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Mat2 = [[C64; 2]; 2];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("ring size must be even and at least 4, got {0}")]
    RingSize(usize),
    #[error("momentum {0} is a self-conjugate special mode; no Bogoliubov angle is defined")]
    SpecialMode(f64),
    #[error("field must be non-negative, got {0}")]
    NegativeField(f64),
    #[error("XYZ couplings must satisfy jx < jy <= 0 and jz >= 0, got ({jx}, {jy}, {jz})")]
    XyzOrdering { jx: f64, jy: f64, jz: f64 },
    #[error("(jz - jx)(jz - jy) = {0} is negative")]
    XyzDomain(f64),
}

/// Fermion-parity sector. `Plus` holds an even number of Jordan–Wigner
/// fermions and uses the half-integer grid `K+`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sector {
    Plus,
    Minus,
}

impl Sector {
    pub fn opposite(self) -> Sector {
        match self {
            Sector::Plus => Sector::Minus,
            Sector::Minus => Sector::Plus,
        }
    }
}

/// A momentum mode of one parity sector on a ring of `n_sites` sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeIndex {
    sector: Sector,
    n_sites: u32,
    m: i32,
}

impl ModeIndex {
    /// `k = m·π/N`. `m` is reduced into `[-N, N)`; its parity must match the
    /// sector (odd for `Plus`, even for `Minus`).
    pub fn new(sector: Sector, n_sites: usize, m: i32) -> Option<Self> {
        let n = n_sites as i32;
        if n_sites < 2 || n_sites % 2 != 0 {
            return None;
        }
        let odd = m.rem_euclid(2) == 1;
        if odd != (sector == Sector::Plus) {
            return None;
        }
        let m = (m + n).rem_euclid(2 * n) - n;
        Some(Self { sector, n_sites: n_sites as u32, m })
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites as usize
    }

    /// Momentum in units of `π/N`.
    pub fn grid_index(&self) -> i32 {
        self.m
    }

    /// Momentum in radians.
    pub fn momentum(&self) -> f64 {
        self.m as f64 * PI / self.n_sites as f64
    }

    /// The mode `-k` of the same sector.
    pub fn neg(&self) -> Self {
        Self::new(self.sector, self.n_sites(), -self.m).expect("negation preserves parity")
    }

    /// `k = 0` or `k = -π` (only present in the odd sector).
    pub fn is_special(&self) -> bool {
        self.m == 0 || self.m == -(self.n_sites as i32)
    }
}

/// Momentum sets of both parity sectors for a ring of `n_sites` sites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentumGrid {
    n_sites: usize,
}

impl MomentumGrid {
    pub fn new(n_sites: usize) -> Result<Self, ModelError> {
        if n_sites < 4 || n_sites % 2 != 0 {
            return Err(ModelError::RingSize(n_sites));
        }
        Ok(Self { n_sites })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    fn mode(&self, sector: Sector, m: i32) -> ModeIndex {
        ModeIndex::new(sector, self.n_sites, m).expect("grid index matches sector")
    }

    /// `K+ = {-π + (2j-1)π/N : j = 1..N}`, ascending.
    pub fn k_plus(&self) -> Vec<ModeIndex> {
        let n = self.n_sites as i32;
        (1..=n).map(|j| self.mode(Sector::Plus, -n + 2 * j - 1)).collect()
    }

    /// `K- = {-π + 2jπ/N : j = 0..N-1}`, ascending.
    pub fn k_minus(&self) -> Vec<ModeIndex> {
        let n = self.n_sites as i32;
        (0..n).map(|j| self.mode(Sector::Minus, -n + 2 * j)).collect()
    }

    pub fn sector_modes(&self, sector: Sector) -> Vec<ModeIndex> {
        match sector {
            Sector::Plus => self.k_plus(),
            Sector::Minus => self.k_minus(),
        }
    }

    /// Positive momenta of a sector, ascending. `N/2` of them in `K+`,
    /// `N/2 - 1` in `K-`.
    pub fn positive(&self, sector: Sector) -> Vec<ModeIndex> {
        self.sector_modes(sector).into_iter().filter(|k| k.grid_index() > 0).collect()
    }

    /// The special modes `(-π, 0)` of `K-`.
    pub fn special_modes(&self) -> (ModeIndex, ModeIndex) {
        (self.mode(Sector::Minus, -(self.n_sites as i32)), self.mode(Sector::Minus, 0))
    }
}

/// `Λ_k = 2√(g² + 2g cos k + 1)`.
pub fn dispersion(k: f64, g: f64) -> f64 {
    2.0 * (g * g + 2.0 * g * k.cos() + 1.0).max(0.0).sqrt()
}

/// `(sin θ_k/2, cos θ_k/2)` of the mode ground state
/// `cos θ/2 |vac⟩ + sin θ/2 |k,-k⟩`.
pub fn bogoliubov_angle(k: f64, g: f64) -> Result<(f64, f64), ModelError> {
    let s = k.sin();
    if s.abs() < 1e-12 {
        return Err(ModelError::SpecialMode(k));
    }
    let lambda = dispersion(k, g);
    let b = k.cos() + g;
    // Λ - 2(cos k + g), rewritten to avoid cancellation when cos k + g > 0
    let d = if b > 0.0 { 4.0 * s * s / (lambda + 2.0 * b) } else { lambda - 2.0 * b };
    let a = 2.0 * s;
    let norm = a.hypot(d);
    Ok((a / norm, d / norm))
}

/// Pair-subspace Hamiltonian in the basis `{|vac⟩_k, c†_k c†_{-k}|vac⟩_k}`.
pub fn mode_hamiltonian_even(k: f64, g: f64) -> Mat2 {
    let a = 2.0 * (k.cos() + g);
    let b = -2.0 * k.sin();
    [[C64::new(a, 0.0), C64::new(b, 0.0)], [C64::new(b, 0.0), C64::new(-a, 0.0)]]
}

/// Diagonal entries of the special-mode Hamiltonians in the bases
/// `{|vac⟩_{-π}, |-π⟩}` and `{|vac⟩_0, |0⟩}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialModeEnergies {
    pub h1_pi: f64,
    pub h2_pi: f64,
    pub h1_0: f64,
    pub h2_0: f64,
}

pub fn special_mode_energies(g: f64) -> SpecialModeEnergies {
    SpecialModeEnergies {
        h1_pi: -2.0 * (1.0 - g),
        h2_pi: 2.0 * (1.0 - g),
        h1_0: 2.0 * (1.0 + g),
        h2_0: -2.0 * (1.0 + g),
    }
}

/// Per-mode data for the positive normal modes of one sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeData {
    pub k: ModeIndex,
    pub lambda: f64,
    pub sin_half_theta: f64,
    pub cos_half_theta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    pub g: f64,
    pub sector: Sector,
    pub modes: Vec<ModeData>,
}

impl ModeSpectrum {
    pub fn new(grid: &MomentumGrid, sector: Sector, g: f64) -> Self {
        let modes = grid
            .positive(sector)
            .into_iter()
            .map(|k| {
                let q = k.momentum();
                let (s, c) = bogoliubov_angle(q, g).expect("positive modes are normal");
                ModeData { k, lambda: dispersion(q, g), sin_half_theta: s, cos_half_theta: c }
            })
            .collect();
        Self { g, sector, modes }
    }
}

/// Sub-ground-state energies `(E_{G,+}, E_{G,-})`.
pub fn sgs_energies(grid: &MomentumGrid, g: f64) -> (f64, f64) {
    let sum = |sector| -> f64 {
        grid.positive(sector).iter().map(|k| dispersion(k.momentum(), g)).sum()
    };
    (-sum(Sector::Plus), -sum(Sector::Minus) - 2.0)
}

/// `Δ(g) = ½(E_{G,-} - E_{G,+})` from the two energy sums. Loses all
/// relative accuracy once `Δ` drops below ~1e-14·N.
pub fn gap_delta_direct(grid: &MomentumGrid, g: f64) -> f64 {
    let (ep, em) = sgs_energies(grid, g);
    0.5 * (em - ep)
}

/// `Δ(g) = ½(E_{G,-} - E_{G,+})` for `g ≥ 0`.
///
/// Deep in the ordered phase `Δ ~ g^N` underflows the difference of the
/// two energy sums, so there the Fourier series of `|1 + g e^{ik}|` is used
/// instead (see [`parity_gap_series`]).
pub fn gap_delta(grid: &MomentumGrid, g: f64) -> Result<f64, ModelError> {
    if g < 0.0 {
        return Err(ModelError::NegativeField(g));
    }
    if use_series(g, grid.n_sites()) {
        Ok(parity_gap_series(g, grid.n_sites()))
    } else {
        Ok(gap_delta_direct(grid, g))
    }
}

fn use_series(x: f64, n: usize) -> bool {
    x < 1.0 && (x <= 0.95 || x.powi(n as i32) < 1e-3)
}

/// `Δl(x) - 1 = -2N Σ_{q odd} a_{qN}(x)` for `0 ≤ x < 1`, where `a_m` are the
/// Fourier coefficients of `|1 + x e^{ik}| = Σ_m a_m e^{imk}`,
/// `a_m = Σ_s C(½, s+m) C(½, s) x^{2s+m}`.
pub fn parity_gap_series(x: f64, n_sites: usize) -> f64 {
    assert!((0.0..1.0).contains(&x), "series requires 0 <= x < 1");
    if x == 0.0 {
        return 0.0;
    }
    let n = n_sites;
    let mut total = 0.0f64;
    let mut q = 1;
    loop {
        let m = q * n;
        let lead = x.powi(m as i32);
        if lead == 0.0 || (q > 1 && lead.abs() < 1e-18 * total.abs()) {
            break;
        }
        total += fourier_coefficient(x, m);
        q += 2;
    }
    -2.0 * n as f64 * total
}

fn binomial_half(r: usize) -> f64 {
    let mut c = 1.0;
    for i in 0..r {
        c *= (0.5 - i as f64) / (i as f64 + 1.0);
    }
    c
}

fn fourier_coefficient(x: f64, m: usize) -> f64 {
    let x2 = x * x;
    let mut c_sm = binomial_half(m);
    let mut c_s = 1.0;
    let mut pow = x.powi(m as i32);
    let mut acc = 0.0;
    let mut s = 0usize;
    loop {
        let term = c_sm * c_s * pow;
        acc += term;
        if s > 2 && term.abs() <= 1e-18 * acc.abs() {
            break;
        }
        if s > 1_000_000 {
            break;
        }
        c_sm *= (0.5 - (s + m) as f64) / ((s + m) as f64 + 1.0);
        c_s *= (0.5 - s as f64) / (s as f64 + 1.0);
        pow *= x2;
        s += 1;
    }
    acc
}

/// Chord-length difference `Σ_j PA_j - Σ_j PB_j` for a point at distance
/// `x` from the centre of the unit semicircle split into `N` sectors.
pub fn delta_l(x: f64, n_sites: usize) -> Result<f64, ModelError> {
    Ok(1.0 + delta_l_excess(x, n_sites)?)
}

/// `Δl(x) - 1`, accurate even where `Δl(x)` rounds to 1.
pub fn delta_l_excess(x: f64, n_sites: usize) -> Result<f64, ModelError> {
    if x < 0.0 {
        return Err(ModelError::NegativeField(x));
    }
    if n_sites < 4 || n_sites % 2 != 0 {
        return Err(ModelError::RingSize(n_sites));
    }
    if use_series(x, n_sites) {
        return Ok(parity_gap_series(x, n_sites));
    }
    Ok(chord_sum(x, n_sites) - 1.0)
}

fn chord_sum(x: f64, n_sites: usize) -> f64 {
    let alpha = PI / n_sites as f64;
    let f = |j: usize| (x * x - 2.0 * x * (j as f64 * alpha).cos() + 1.0).max(0.0).sqrt();
    let half = n_sites / 2;
    let odd: f64 = (1..=half).map(|j| f(2 * j - 1)).sum();
    let even: f64 = (1..half).map(|j| f(2 * j)).sum();
    odd - even
}

/// `Π_{k>0, k∈K+} sin(k/2)`; equals `2^{-(N-1)/2}`.
pub fn cat_norm_identity(n_sites: usize) -> Result<f64, ModelError> {
    let grid = MomentumGrid::new(n_sites)?;
    Ok(grid.positive(Sector::Plus).iter().map(|k| (k.momentum() / 2.0).sin()).product())
}

/// Frustration-free point of the XYZ chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XyzFactorization {
    pub h_star: f64,
    pub beta_star: f64,
    /// `⟨Ψ+|Ψ-⟩` of the two factorized ground states.
    pub overlap: f64,
}

pub fn xyz_factorization(jx: f64, jy: f64, jz: f64, n_sites: usize) -> Result<XyzFactorization, ModelError> {
    if !(jx < jy && jy <= 0.0 && jz >= 0.0) {
        return Err(ModelError::XyzOrdering { jx, jy, jz });
    }
    let prod = (jz - jx) * (jz - jy);
    if prod < 0.0 {
        return Err(ModelError::XyzDomain(prod));
    }
    let h_star = prod.sqrt();
    let d = jx - jy;
    let beta_star = -d / ((d * d + 4.0 * h_star * h_star).sqrt() - 2.0 * h_star);
    let overlap = ((1.0 - beta_star) / (1.0 + beta_star)).powi(n_sites as i32);
    Ok(XyzFactorization { h_star, beta_star, overlap })
}
