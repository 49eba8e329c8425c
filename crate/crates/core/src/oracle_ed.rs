//! Exact diagonalization on the full `2^N` spin space, for small rings.
//!
//! Basis states are bit strings with site 1 in the lowest bit; a set bit is
//! `|↑⟩`, which the Jordan–Wigner map sends to an occupied fermion
//! (`σᶻ = 2c†c - 1`). `c_j` carries the string `(-1)^{#occupied sites < j}`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{SystemState, NORM_TOL};
use crate::model::{bogoliubov_angle, ModeIndex, MomentumGrid, Sector};
use crate::observables::MagnetizationSample;

pub const MAX_SITES: usize = 12;

/// Ground states closer than this are reported as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("exact diagonalization needs an even ring size in 4..={MAX_SITES}, got {0}")]
    RingSize(usize),
    #[error("site {site} outside 1..={n_sites}")]
    Site { site: usize, n_sites: usize },
    #[error("ground space is degenerate (gap {0:e}); use the cat-state basis")]
    Degenerate(f64),
    #[error("state has {got} amplitudes, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("state norm {0} differs from 1")]
    Norm(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

fn check_size(n_sites: usize) -> Result<(), OracleError> {
    if !(4..=MAX_SITES).contains(&n_sites) || n_sites % 2 != 0 {
        return Err(OracleError::RingSize(n_sites));
    }
    Ok(())
}

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

/// A state vector in the `σᶻ` product basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    n_sites: usize,
    amps: Vec<C64>,
}

impl DenseState {
    /// Normalized state from raw amplitudes.
    pub fn new(n_sites: usize, amps: Vec<C64>) -> Result<Self, OracleError> {
        let s = Self::unnormalized(n_sites, amps)?;
        let norm = s.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(OracleError::Norm(norm));
        }
        Ok(s)
    }

    fn unnormalized(n_sites: usize, amps: Vec<C64>) -> Result<Self, OracleError> {
        if amps.len() != 1 << n_sites {
            return Err(OracleError::Dimension { expected: 1 << n_sites, got: amps.len() });
        }
        Ok(Self { n_sites, amps })
    }

    /// The fermion vacuum `|↓…↓⟩`.
    pub fn vacuum(n_sites: usize) -> Self {
        let mut amps = vec![zero(); 1 << n_sites];
        amps[0] = C64::new(1.0, 0.0);
        Self { n_sites, amps }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &DenseState) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scaled(mut self, z: C64) -> Self {
        self.amps.iter_mut().for_each(|a| *a *= z);
        self
    }

    pub fn add(mut self, other: &DenseState) -> Self {
        self.amps.iter_mut().zip(&other.amps).for_each(|(a, b)| *a += b);
        self
    }
}

/// `|→⟩^{⊗N}` with `|→⟩ = (|↓⟩ + |↑⟩)/√2`.
pub fn ferro_right(n_sites: usize) -> DenseState {
    let a = C64::new((0.5f64).powf(n_sites as f64 / 2.0), 0.0);
    DenseState { n_sites, amps: vec![a; 1 << n_sites] }
}

/// `|←⟩^{⊗N}` with `|←⟩ = (|↓⟩ - |↑⟩)/√2`.
pub fn ferro_left(n_sites: usize) -> DenseState {
    let a = (0.5f64).powf(n_sites as f64 / 2.0);
    let amps = (0..1usize << n_sites)
        .map(|b| C64::new(if b.count_ones() % 2 == 0 { a } else { -a }, 0.0))
        .collect();
    DenseState { n_sites, amps }
}

/// `(|→…→⟩ ± |←…←⟩)/√2`.
pub fn cat_state(n_sites: usize, parity: Parity) -> DenseState {
    let s = match parity {
        Parity::Even => 1.0,
        Parity::Odd => -1.0,
    };
    let r = ferro_right(n_sites);
    let l = ferro_left(n_sites).scaled(C64::new(s, 0.0));
    r.add(&l).scaled(C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0))
}

/// `H = -Σ_j (σˣ_j σˣ_{j+1} + g σᶻ_j)` on the periodic ring.
pub fn build_hamiltonian(n_sites: usize, g: f64) -> Result<DMatrix<f64>, OracleError> {
    check_size(n_sites)?;
    let dim = 1usize << n_sites;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for b in 0..dim {
        h[(b, b)] = -g * (2.0 * b.count_ones() as f64 - n_sites as f64);
        for j in 0..n_sites {
            let mask = (1usize << j) | (1usize << ((j + 1) % n_sites));
            h[(b ^ mask, b)] -= 1.0;
        }
    }
    Ok(h)
}

/// Eigen-decomposition of the ring Hamiltonian, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SpectralHamiltonian {
    pub n_sites: usize,
    pub g: f64,
    pub energies: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

impl SpectralHamiltonian {
    pub fn new(n_sites: usize, g: f64) -> Result<Self, OracleError> {
        let eig = SymmetricEigen::new(build_hamiltonian(n_sites, g)?);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let energies = DVector::from_iterator(order.len(), order.iter().map(|&i| eig.eigenvalues[i]));
        let vectors = eig.eigenvectors.select_columns(&order);
        Ok(Self { n_sites, g, energies, vectors })
    }

    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    pub fn eigenstate(&self, i: usize) -> DenseState {
        let amps = self.vectors.column(i).iter().map(|&x| C64::new(x, 0.0)).collect();
        DenseState { n_sites: self.n_sites, amps }
    }

    /// `⟨ψ|H|ψ⟩`.
    pub fn energy_of(&self, state: &DenseState) -> f64 {
        let (re, im) = split(state);
        let pr = self.vectors.tr_mul(&re);
        let pi = self.vectors.tr_mul(&im);
        (0..self.energies.len()).map(|i| self.energies[i] * (pr[i] * pr[i] + pi[i] * pi[i])).sum()
    }
}

fn split(state: &DenseState) -> (DVector<f64>, DVector<f64>) {
    let re = DVector::from_iterator(state.amps.len(), state.amps.iter().map(|z| z.re));
    let im = DVector::from_iterator(state.amps.len(), state.amps.iter().map(|z| z.im));
    (re, im)
}

/// `e^{-iHt}|ψ⟩`.
pub fn evolve_exact(state: &DenseState, h: &SpectralHamiltonian, t: f64) -> Result<DenseState, OracleError> {
    if state.n_sites != h.n_sites {
        return Err(OracleError::Dimension { expected: 1 << h.n_sites, got: state.amps.len() });
    }
    let (re, im) = split(state);
    let mut pr = h.vectors.tr_mul(&re);
    let mut pi = h.vectors.tr_mul(&im);
    for i in 0..pr.len() {
        let z = C64::new(pr[i], pi[i]) * C64::cis(-h.energies[i] * t);
        pr[i] = z.re;
        pi[i] = z.im;
    }
    let re = &h.vectors * pr;
    let im = &h.vectors * pi;
    let amps = re.iter().zip(im.iter()).map(|(&a, &b)| C64::new(a, b)).collect();
    Ok(DenseState { n_sites: state.n_sites, amps })
}

/// `K_φ = e^{-i(φ/2) Σ σᶻ_j}`.
pub fn apply_kick(state: &DenseState, phi: f64) -> DenseState {
    let n = state.n_sites as f64;
    let amps = state
        .amps
        .iter()
        .enumerate()
        .map(|(b, a)| a * C64::cis(-0.5 * phi * (2.0 * b.count_ones() as f64 - n)))
        .collect();
    DenseState { n_sites: state.n_sites, amps }
}

/// `⟨σ^axis_site⟩`, sites numbered from 1.
pub fn measure(state: &DenseState, axis: Axis, site: usize) -> Result<f64, OracleError> {
    if site == 0 || site > state.n_sites {
        return Err(OracleError::Site { site, n_sites: state.n_sites });
    }
    let bit = 1usize << (site - 1);
    let a = &state.amps;
    let value: f64 = match axis {
        Axis::Z => a.iter().enumerate().map(|(b, z)| if b & bit != 0 { z.norm_sqr() } else { -z.norm_sqr() }).sum(),
        Axis::X => a.iter().enumerate().map(|(b, z)| (a[b ^ bit].conj() * z).re).sum(),
        // σʸ|↑⟩ = i|↓⟩, σʸ|↓⟩ = -i|↑⟩
        Axis::Y => a
            .iter()
            .enumerate()
            .map(|(b, z)| {
                let f = if b & bit != 0 { C64::new(0.0, 1.0) } else { C64::new(0.0, -1.0) };
                (a[b ^ bit].conj() * f * z).re
            })
            .sum(),
    };
    Ok(value)
}

/// Site-summed `(M_x, M_y, M_z)`.
pub fn total_magnetization(state: &DenseState, time: f64) -> MagnetizationSample {
    let sum = |axis| (1..=state.n_sites).map(|j| measure(state, axis, j).expect("site in range")).sum();
    MagnetizationSample { time, mx: sum(Axis::X), my: sum(Axis::Y), mz: sum(Axis::Z) }
}

/// Eigenvalue of `(-1)^{#fermions}` if the state has definite parity.
pub fn parity_of(state: &DenseState) -> Option<Parity> {
    let even: f64 = state.amps.iter().enumerate().filter(|(b, _)| b.count_ones() % 2 == 0).map(|(_, z)| z.norm_sqr()).sum();
    let total = state.norm().powi(2);
    if (even - total).abs() < 1e-10 * total {
        Some(Parity::Even)
    } else if even < 1e-10 * total {
        Some(Parity::Odd)
    } else {
        None
    }
}

/// Fermion parity of the non-degenerate ground state.
pub fn ground_parity(n_sites: usize, g: f64) -> Result<Parity, OracleError> {
    let h = SpectralHamiltonian::new(n_sites, g)?;
    let gap = h.energies[1] - h.energies[0];
    if gap < DEGENERACY_TOL {
        return Err(OracleError::Degenerate(gap));
    }
    Ok(parity_of(&h.eigenstate(0)).expect("non-degenerate eigenstates have definite parity"))
}

/// Ascending spectrum of `H` restricted to one fermion-parity sector.
pub fn sector_spectrum(n_sites: usize, g: f64, parity: Parity) -> Result<Vec<f64>, OracleError> {
    let h = build_hamiltonian(n_sites, g)?;
    let want = match parity {
        Parity::Even => 0,
        Parity::Odd => 1,
    };
    let idx: Vec<usize> = (0..1usize << n_sites).filter(|b| b.count_ones() % 2 == want).collect();
    let sub = h.select_rows(&idx).select_columns(&idx);
    let mut e: Vec<f64> = SymmetricEigen::new(sub).eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    Ok(e)
}

fn string_sign(b: usize, j: usize) -> f64 {
    if (b & ((1usize << j) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `c†_j`, sites numbered from 1.
pub fn apply_site_creation(state: &DenseState, site: usize) -> DenseState {
    let j = site - 1;
    let mut out = vec![zero(); state.amps.len()];
    for (b, a) in state.amps.iter().enumerate() {
        if b & (1 << j) == 0 {
            out[b | (1 << j)] += a * string_sign(b, j);
        }
    }
    DenseState { n_sites: state.n_sites, amps: out }
}

/// `c_j`, sites numbered from 1.
pub fn apply_site_annihilation(state: &DenseState, site: usize) -> DenseState {
    let j = site - 1;
    let mut out = vec![zero(); state.amps.len()];
    for (b, a) in state.amps.iter().enumerate() {
        if b & (1 << j) != 0 {
            out[b ^ (1 << j)] += a * string_sign(b, j);
        }
    }
    DenseState { n_sites: state.n_sites, amps: out }
}

/// `c†_k = (e^{iπ/4}/√N) Σ_j e^{ikj} c†_j`.
pub fn apply_mode_creation(state: &DenseState, k: ModeIndex) -> DenseState {
    let n = state.n_sites;
    let pref = C64::cis(std::f64::consts::FRAC_PI_4) / (n as f64).sqrt();
    let mut out = DenseState { n_sites: n, amps: vec![zero(); state.amps.len()] };
    for j in 1..=n {
        let term = apply_site_creation(state, j).scaled(pref * C64::cis(k.momentum() * j as f64));
        out = out.add(&term);
    }
    out
}

/// `(u + v c†_k c†_{-k})|ψ⟩`.
pub fn apply_pair(state: &DenseState, k: ModeIndex, u: C64, v: C64) -> DenseState {
    let pair = apply_mode_creation(&apply_mode_creation(state, k.neg()), k);
    state.clone().scaled(u).add(&pair.scaled(v))
}

/// `[c†_0] Π (u_k + v_k c†_k c†_{-k}) |vac⟩` in the spin basis.
pub fn momentum_product_state(n_sites: usize, pairs: &[(ModeIndex, C64, C64)], zero_mode: Option<ModeIndex>) -> DenseState {
    let mut s = DenseState::vacuum(n_sites);
    for &(k, u, v) in pairs.iter().rev() {
        s = apply_pair(&s, k, u, v);
    }
    if let Some(z) = zero_mode {
        s = apply_mode_creation(&s, z);
    }
    s
}

/// Sub-ground state `|G_σ⟩` of one parity sector at field `g`.
pub fn build_momentum_sgs(n_sites: usize, sector: Sector, g: f64) -> Result<DenseState, OracleError> {
    check_size(n_sites)?;
    let grid = MomentumGrid::new(n_sites).map_err(|_| OracleError::RingSize(n_sites))?;
    let pairs: Vec<_> = grid
        .positive(sector)
        .into_iter()
        .map(|k| {
            let (s, c) = bogoliubov_angle(k.momentum(), g).expect("positive modes are normal");
            (k, C64::new(c, 0.0), C64::new(s, 0.0))
        })
        .collect();
    let zero_mode = match sector {
        Sector::Plus => None,
        Sector::Minus => Some(grid.special_modes().1),
    };
    Ok(momentum_product_state(n_sites, &pairs, zero_mode))
}

/// Even and odd components `(|A⟩, |B⟩)` of a [`SystemState`], without the
/// `1/√2` weights and the odd-sector phase.
pub fn sector_components(state: &SystemState) -> (DenseState, DenseState) {
    let n = state.n_sites();
    let pairs = |amps: &[crate::dynamics::ModeAmplitude]| -> Vec<(ModeIndex, C64, C64)> { amps.iter().map(|a| (a.k, a.u, a.v)).collect() };
    let a = momentum_product_state(n, &pairs(&state.amps_plus), None);
    let b = momentum_product_state(n, &pairs(&state.amps_minus), Some(state.grid.special_modes().1));
    (a, b)
}

/// `|ψ⟩ = (|A⟩ + e^{-iπ/4} e^{-iγ} |B⟩)/√2` in the spin basis.
pub fn dense_from_system_state(state: &SystemState) -> Result<DenseState, OracleError> {
    check_size(state.n_sites())?;
    if state.max_norm_drift() > NORM_TOL {
        return Err(OracleError::Norm(1.0 + state.max_norm_drift()));
    }
    let (a, b) = sector_components(state);
    let phase = C64::cis(-std::f64::consts::FRAC_PI_4 - state.gamma);
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Ok(a.scaled(h).add(&b.scaled(h * phase)))
}

/// Exact quench trajectory from `|→…→⟩` under `H(g_f)`.
pub fn ed_quench_series(n_sites: usize, g_f: f64, times: &[f64]) -> Result<Vec<MagnetizationSample>, OracleError> {
    let h = SpectralHamiltonian::new(n_sites, g_f)?;
    let init = ferro_right(n_sites);
    times.iter().map(|&t| Ok(total_magnetization(&evolve_exact(&init, &h, t)?, t))).collect()
}

/// Exact stroboscopic trajectory under `K_{π(1-ε)} e^{-iH(g)τ}`, sampled
/// after kicks `1..=n_kicks`.
pub fn ed_kick_series(n_sites: usize, g: f64, tau: f64, epsilon: f64, n_kicks: usize) -> Result<Vec<MagnetizationSample>, OracleError> {
    let h = SpectralHamiltonian::new(n_sites, g)?;
    let phi = std::f64::consts::PI * (1.0 - epsilon);
    let mut s = ferro_right(n_sites);
    let mut out = Vec::with_capacity(n_kicks);
    for n in 1..=n_kicks {
        s = apply_kick(&evolve_exact(&s, &h, tau)?, phi);
        out.push(total_magnetization(&s, n as f64 * tau));
    }
    Ok(out)
}
