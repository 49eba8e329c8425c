//! Site magnetizations of the evolved state.
//!
//! With `σˣ_1 = c_1 + c†_1` and `σʸ_1 = i(c_1 - c†_1)`, translation
//! invariance gives `M_x = 2N Re⟨c_1⟩` and `M_y = -2N Im⟨c_1⟩`. `c_1` is odd,
//! so only the cross-parity overlaps survive:
//!
//! ```text
//! ⟨c_1⟩ = ½ e^{-iπ/4} e^{-iγ} ⟨A|c_1|B⟩ + ½ e^{iπ/4} e^{iγ} ⟨B|c_1|A⟩
//! ```
//!
//! with `|A⟩` the even-sector product and `|B⟩ = c†_0 Π_{K-}(…)|vac⟩`.
//! Expanding `c_1` in the momentum basis of the ket gives three families of
//! words, each a vacuum expectation evaluated by [`vacuum_expectation`].

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{evolve_kick_step, evolve_quench, init_ferro, DriverSpec, DynamicsError, ModeAmplitude, SystemState};
use crate::model::{MomentumGrid, Sector};
use crate::wick::{vacuum_expectation, FermionWord, LinearOperator, WickError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObservableError {
    #[error(transparent)]
    Wick(#[from] WickError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("schedule must be strictly increasing and non-negative (entry {0})")]
    Schedule(usize),
    #[error("schedule kind does not match the driver")]
    ScheduleKind,
}

/// Site-summed magnetizations at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MagnetizationSample {
    pub time: f64,
    pub mx: f64,
    pub my: f64,
    pub mz: f64,
}

/// The three contributions to `⟨c_1⟩`, prefactors included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct C1Terms {
    /// `c_0` removing the special-mode fermion of `|B⟩`.
    pub term1: C64,
    /// `c_{±k'}` breaking one odd-sector pair.
    pub term2: C64,
    /// `c_{±p'}` breaking one even-sector pair.
    pub term3: C64,
}

impl C1Terms {
    pub fn sum(&self) -> C64 {
        self.term1 + self.term2 + self.term3
    }

    /// `⟨A|c_1|B⟩` part, `½ e^{-iπ/4} e^{-iγ} ⟨A|c_1|B⟩`.
    pub fn a_to_b(&self) -> C64 {
        self.term1 + self.term2
    }

    /// `½ e^{iπ/4} e^{iγ} ⟨B|c_1|A⟩`.
    pub fn b_to_a(&self) -> C64 {
        self.term3
    }
}

/// `⟨vac| c_{-k} η_k` for the bra of `u + v c†_k c†_{-k}`.
fn bra_pair(a: &ModeAmplitude, out: &mut Vec<LinearOperator>) {
    out.push(LinearOperator::annihilate(a.k.neg()));
    out.push(LinearOperator::eta_dagger(a.k, a.u, a.v).adjoint());
}

/// `η†_k c†_{-k} |vac⟩ = (u + v c†_k c†_{-k})|vac⟩`.
fn ket_pair(a: &ModeAmplitude, out: &mut Vec<LinearOperator>) {
    out.push(LinearOperator::eta_dagger(a.k, a.u, a.v));
    out.push(LinearOperator::create(a.k.neg()));
}

fn bra_product(amps: &[ModeAmplitude], out: &mut Vec<LinearOperator>) {
    for a in amps.iter().rev() {
        bra_pair(a, out);
    }
}

fn ket_product(amps: &[ModeAmplitude], skip: Option<usize>, out: &mut Vec<LinearOperator>) {
    for (i, a) in amps.iter().enumerate() {
        if Some(i) != skip {
            ket_pair(a, out);
        }
    }
}

/// `c_{k'}` and `c_{-k'}` acting on `v c†_{k'} c†_{-k'}|vac⟩`, weighted by the
/// Fourier phases of `c_1`: `v (e^{ik'} c†_{-k'} - e^{-ik'} c†_{k'})`.
fn broken_pair(a: &ModeAmplitude) -> LinearOperator {
    let k = a.k.momentum();
    LinearOperator {
        ann: vec![],
        cre: vec![(a.k.neg(), a.v * C64::cis(k)), (a.k, -a.v * C64::cis(-k))],
    }
}

/// The odd-sector special modes of `|B⟩`.
fn zero_mode(grid: &MomentumGrid) -> crate::model::ModeIndex {
    grid.special_modes().1
}

/// The three term families of `⟨c_1⟩`, evaluated word by word.
pub fn c1_terms(state: &SystemState) -> Result<C1Terms, ObservableError> {
    let n = state.n_sites() as f64;
    let zero = zero_mode(&state.grid);
    let plus = &state.amps_plus;
    let minus = &state.amps_minus;
    let pref12 = C64::cis(-state.gamma) / (2.0 * n.sqrt());
    let pref3 = C64::new(0.0, 1.0) * C64::cis(state.gamma) / (2.0 * n.sqrt());

    let term1 = {
        let mut ops = Vec::with_capacity(2 * (plus.len() + minus.len()));
        bra_product(plus, &mut ops);
        ket_product(minus, None, &mut ops);
        vacuum_expectation(&FermionWord::new(ops))?
    };

    let term2: C64 = (0..minus.len())
        .into_par_iter()
        .map(|i| {
            let mut ops = Vec::with_capacity(2 * (plus.len() + minus.len()));
            bra_product(plus, &mut ops);
            ops.push(broken_pair(&minus[i]));
            ops.push(LinearOperator::create(zero));
            ket_product(minus, Some(i), &mut ops);
            vacuum_expectation(&FermionWord::new(ops))
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .sum();

    let term3: C64 = (0..plus.len())
        .into_par_iter()
        .map(|i| {
            let mut ops = Vec::with_capacity(2 * (plus.len() + minus.len()));
            bra_product(minus, &mut ops);
            ops.push(LinearOperator::annihilate(zero));
            ops.push(broken_pair(&plus[i]));
            ket_product(plus, Some(i), &mut ops);
            vacuum_expectation(&FermionWord::new(ops))
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .sum();

    Ok(C1Terms { term1: pref12 * term1, term2: pref12 * term2, term3: pref3 * term3 })
}

/// `⟨ψ(t)|c_1|ψ(t)⟩`.
pub fn expectation_c1(state: &SystemState) -> Result<C64, ObservableError> {
    Ok(c1_terms(state)?.sum())
}

/// `c_1` written in the momentum basis of one sector.
pub fn site_one_annihilator(grid: &MomentumGrid, sector: Sector) -> LinearOperator {
    let n = grid.n_sites() as f64;
    let pref = C64::cis(std::f64::consts::FRAC_PI_4) / n.sqrt();
    LinearOperator { ann: grid.sector_modes(sector).into_iter().map(|k| (k, pref * C64::cis(k.momentum()))).collect(), cre: vec![] }
}

/// `⟨c_1⟩` from two Pfaffians, `⟨A|c_1|B⟩` and `⟨B|c_1|A⟩`, with `c_1`
/// kept as a single linear form. Used as an independent cross-check of the
/// term-by-term evaluation.
pub fn expectation_c1_fused(state: &SystemState) -> Result<C64, ObservableError> {
    let zero = zero_mode(&state.grid);
    let plus = &state.amps_plus;
    let minus = &state.amps_minus;

    let mut ab = Vec::new();
    bra_product(plus, &mut ab);
    ab.push(site_one_annihilator(&state.grid, Sector::Minus));
    ab.push(LinearOperator::create(zero));
    ket_product(minus, None, &mut ab);
    let a_c1_b = vacuum_expectation(&FermionWord::new(ab))?;

    let mut ba = Vec::new();
    bra_product(minus, &mut ba);
    ba.push(LinearOperator::annihilate(zero));
    ba.push(site_one_annihilator(&state.grid, Sector::Plus));
    ket_product(plus, None, &mut ba);
    let b_c1_a = vacuum_expectation(&FermionWord::new(ba))?;

    let q = C64::cis(std::f64::consts::FRAC_PI_4);
    Ok(0.5 * (q.conj() * C64::cis(-state.gamma) * a_c1_b + q * C64::cis(state.gamma) * b_c1_a))
}

/// `⟨ψ|c†_1|ψ⟩` from the Hermitian-conjugate words.
pub fn expectation_c1_dagger(state: &SystemState) -> Result<C64, ObservableError> {
    let zero = zero_mode(&state.grid);
    let plus = &state.amps_plus;
    let minus = &state.amps_minus;
    let c1_minus = site_one_annihilator(&state.grid, Sector::Minus).adjoint();
    let c1_plus = site_one_annihilator(&state.grid, Sector::Plus).adjoint();

    // ⟨B|c†_1|A⟩ = conj⟨A|c_1|B⟩ built as its own word
    let mut ba = Vec::new();
    bra_product(minus, &mut ba);
    ba.push(LinearOperator::annihilate(zero));
    ba.push(c1_minus);
    ket_product(plus, None, &mut ba);
    let b_c1d_a = vacuum_expectation(&FermionWord::new(ba))?;

    let mut ab = Vec::new();
    bra_product(plus, &mut ab);
    ab.push(c1_plus);
    ab.push(LinearOperator::create(zero));
    ket_product(minus, None, &mut ab);
    let a_c1d_b = vacuum_expectation(&FermionWord::new(ab))?;

    let q = C64::cis(std::f64::consts::FRAC_PI_4);
    Ok(0.5 * (q * C64::cis(state.gamma) * b_c1d_a + q.conj() * C64::cis(-state.gamma) * a_c1d_b))
}

/// `Σ_{k>0} (|v_k|² - |u_k|²)` over both sectors.
pub fn magnetization_z(state: &SystemState) -> f64 {
    state.amps_plus.iter().chain(&state.amps_minus).map(|a| a.v.norm_sqr() - a.u.norm_sqr()).sum()
}

pub fn magnetization(state: &SystemState) -> Result<MagnetizationSample, ObservableError> {
    let c1 = expectation_c1(state)?;
    let n = state.n_sites() as f64;
    Ok(MagnetizationSample { time: state.time, mx: 2.0 * n * c1.re, my: -2.0 * n * c1.im, mz: magnetization_z(state) })
}

/// Sample points of a run: evolution times for a quench, kick counts for a
/// periodic drive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Schedule {
    Times(Vec<f64>),
    Kicks(Vec<usize>),
}

impl Schedule {
    pub fn len(&self) -> usize {
        match self {
            Schedule::Times(t) => t.len(),
            Schedule::Kicks(k) => k.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn validate(&self) -> Result<(), ObservableError> {
        match self {
            Schedule::Times(t) => {
                for (i, w) in t.iter().enumerate() {
                    if !(w.is_finite() && *w >= 0.0) || (i > 0 && *w <= t[i - 1]) {
                        return Err(ObservableError::Schedule(i));
                    }
                }
            }
            Schedule::Kicks(k) => {
                if let Some(i) = (1..k.len()).find(|&i| k[i] <= k[i - 1]) {
                    return Err(ObservableError::Schedule(i));
                }
            }
        }
        Ok(())
    }
}

/// Evolved states at every schedule point, in schedule order.
pub fn states_along(driver: &DriverSpec, grid: &MomentumGrid, schedule: &Schedule) -> Result<Vec<SystemState>, ObservableError> {
    schedule.validate()?;
    let init = init_ferro(grid);
    match (driver, schedule) {
        (DriverSpec::Quench { g_f }, Schedule::Times(times)) => times
            .par_iter()
            .map(|&t| {
                let s = evolve_quench(&init, *g_f, t);
                s.check_norm()?;
                Ok(s)
            })
            .collect(),
        (DriverSpec::Kick { g, tau, epsilon }, Schedule::Kicks(kicks)) => {
            let mut out = Vec::with_capacity(kicks.len());
            let mut s = init;
            let mut done = 0;
            for &target in kicks {
                while done < target {
                    s = evolve_kick_step(&s, *g, *tau, *epsilon);
                    s.check_norm()?;
                    done += 1;
                }
                out.push(s.clone());
            }
            Ok(out)
        }
        _ => Err(ObservableError::ScheduleKind),
    }
}

/// Magnetization time series. Kick samples are taken just after the n-th
/// kick; the sample `time` is then `n·τ`.
pub fn run_series(driver: &DriverSpec, grid: &MomentumGrid, schedule: &Schedule) -> Result<Vec<MagnetizationSample>, ObservableError> {
    let states = states_along(driver, grid, schedule)?;
    states.par_iter().map(magnetization).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn initial_state_is_x_polarized() {
        for n in [4, 6, 8, 12, 20] {
            let s = init_ferro(&MomentumGrid::new(n).unwrap());
            let c1 = expectation_c1(&s).unwrap();
            assert!((c1 - C64::new(0.5, 0.0)).norm() < 1e-12, "N={n}: {c1}");
            let m = magnetization(&s).unwrap();
            assert!((m.mx - n as f64).abs() < 1e-10);
            assert!(m.my.abs() < 1e-10);
            assert!(m.mz.abs() < 1e-12);
        }
    }

    #[test]
    fn fused_and_termwise_agree() {
        let grid = MomentumGrid::new(10).unwrap();
        let init = init_ferro(&grid);
        let mut s = init.clone();
        for step in 0..15 {
            s = evolve_kick_step(&s, 0.5, 0.5, 0.02);
            let q = evolve_quench(&init, 0.5 + 0.1 * step as f64, 0.37 * step as f64);
            for st in [&s, &q] {
                let a = expectation_c1(st).unwrap();
                let b = expectation_c1_fused(st).unwrap();
                assert!((a - b).norm() < 1e-12, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn dagger_is_conjugate() {
        let grid = MomentumGrid::new(8).unwrap();
        let init = init_ferro(&grid);
        for t in [0.0, 0.4, 1.3, 3.7] {
            let s = evolve_quench(&init, 1.0, t);
            let c = expectation_c1(&s).unwrap();
            let cd = expectation_c1_dagger(&s).unwrap();
            assert!((cd - c.conj()).norm() < 1e-10);
        }
    }

    #[test]
    fn zero_field_is_stationary() {
        let grid = MomentumGrid::new(10).unwrap();
        let init = init_ferro(&grid);
        for t in [0.5, 2.0, 7.5] {
            let m = magnetization(&evolve_quench(&init, 0.0, t)).unwrap();
            assert!((m.mx - 10.0).abs() < 1e-10 && m.my.abs() < 1e-10);
        }
    }

    #[test]
    fn unperturbed_kicks_flip() {
        let grid = MomentumGrid::new(8).unwrap();
        let d = DriverSpec::Kick { g: 0.0, tau: 0.5, epsilon: 0.0 };
        let out = run_series(&d, &grid, &Schedule::Kicks((1..=6).collect())).unwrap();
        for (i, m) in out.iter().enumerate() {
            let expect = if i % 2 == 0 { -8.0 } else { 8.0 };
            assert!((m.mx - expect).abs() < 1e-10, "{i}: {}", m.mx);
        }
        assert!((out[5].time - 3.0).abs() < 1e-15);
    }

    #[test]
    fn schedules() {
        let grid = MomentumGrid::new(6).unwrap();
        let q = DriverSpec::Quench { g_f: 0.5 };
        assert!(run_series(&q, &grid, &Schedule::Times(vec![])).unwrap().is_empty());
        let one = run_series(&q, &grid, &Schedule::Times(vec![0.0])).unwrap();
        assert_eq!(one.len(), 1);
        assert!((one[0].mx - 6.0).abs() < 1e-12);
        assert!(matches!(run_series(&q, &grid, &Schedule::Times(vec![1.0, 0.5])), Err(ObservableError::Schedule(1))));
        assert!(matches!(run_series(&q, &grid, &Schedule::Kicks(vec![1])), Err(ObservableError::ScheduleKind)));
        let times: Vec<f64> = (0..40).map(|i| 0.25 * i as f64).collect();
        let series = run_series(&q, &grid, &Schedule::Times(times.clone())).unwrap();
        for (m, t) in series.iter().zip(&times) {
            assert_eq!(m.time, *t);
            for x in [m.mx, m.my, m.mz] {
                assert!(x.abs() <= 6.0 + 1e-9);
            }
        }
    }

    #[test]
    fn kick_momentum_phase_sanity() {
        // the broken-pair operator carries e^{±ik'}; at k' = π/2 it is ±i
        let grid = MomentumGrid::new(4).unwrap();
        let s = init_ferro(&grid);
        let a = s.amps_minus[0];
        assert!((a.k.momentum() - PI / 2.0).abs() < 1e-15);
        let op = broken_pair(&a);
        assert!((op.cre[0].1 - a.v * C64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn c1_matches_exact_spin_components() {
        use crate::oracle_ed::{evolve_exact, ferro_right, measure, Axis, SpectralHamiltonian};
        let n = 8;
        let grid = MomentumGrid::new(n).unwrap();
        let h = SpectralHamiltonian::new(n, 0.5).unwrap();
        let init = init_ferro(&grid);
        for t in [0.5, 1.0, 2.0] {
            let ed = evolve_exact(&ferro_right(n), &h, t).unwrap();
            // c_1 = σ⁻_1 = (σˣ_1 - iσʸ_1)/2
            let x = measure(&ed, Axis::X, 1).unwrap();
            let y = measure(&ed, Axis::Y, 1).unwrap();
            let c1 = expectation_c1(&evolve_quench(&init, 0.5, t)).unwrap();
            assert!((c1 - C64::new(x, -y) / 2.0).norm() < 1e-8, "t={t}");
        }
    }

    #[test]
    fn mz_matches_exact_for_both_drivers() {
        use crate::oracle_ed::{ed_kick_series, ed_quench_series};
        for n in [4, 6, 10] {
            let grid = MomentumGrid::new(n).unwrap();
            let times: Vec<f64> = (0..12).map(|i| 0.7 * i as f64).collect();
            let pf = run_series(&DriverSpec::Quench { g_f: 1.5 }, &grid, &Schedule::Times(times.clone())).unwrap();
            let ed = ed_quench_series(n, 1.5, &times).unwrap();
            for (a, b) in pf.iter().zip(&ed) {
                assert!((a.mz - b.mz).abs() < 1e-8);
            }
            let pf = run_series(&DriverSpec::Kick { g: 0.5, tau: 0.5, epsilon: 0.02 }, &grid, &Schedule::Kicks((1..=20).collect())).unwrap();
            let ed = ed_kick_series(n, 0.5, 0.5, 0.02, 20).unwrap();
            for (a, b) in pf.iter().zip(&ed) {
                assert!((a.mz - b.mz).abs() < 1e-8);
                assert!((a.mx - b.mx).abs() < 1e-8 && (a.my - b.my).abs() < 1e-8);
            }
        }
    }
}
