//! Time evolution of the two-sector BCS state.
//!
//! The state after any translationally invariant drive starting from
//! `|→…→⟩` is
//!
//! ```text
//! |ψ(t)⟩ = 1/√2 Π_{k∈K+} (u_k + v_k c†_k c†_{-k})|vac⟩
//!        + e^{-iπ/4} e^{-iγ}/√2 c†_0 Π_{k∈K-} (u_k + v_k c†_k c†_{-k})|vac⟩
//! ```
//!
//! Each `(u_k, v_k)` follows its own 2×2 Schrödinger equation; the special
//! modes stay frozen at `|vac⟩_{-π} ⊗ |0⟩` and only contribute the phase
//! `γ`. Both implemented drives are piecewise constant, so every step is an
//! exact 2×2 exponential.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{mode_hamiltonian_even, special_mode_energies, Mat2, ModeIndex, MomentumGrid, Sector};

/// Normalization drift tolerated per mode.
pub const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("generator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("mode normalization drifted by {0:e}")]
    NormDrift(f64),
}

/// `u|vac⟩ + v c†_k c†_{-k}|vac⟩` for one positive mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeAmplitude {
    pub k: ModeIndex,
    pub u: C64,
    pub v: C64,
}

impl ModeAmplitude {
    fn apply(&self, m: &Mat2) -> Self {
        Self {
            k: self.k,
            u: m[0][0] * self.u + m[0][1] * self.v,
            v: m[1][0] * self.u + m[1][1] * self.v,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.u.norm_sqr() + self.v.norm_sqr()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    pub grid: MomentumGrid,
    /// Positive `K+` modes, ascending.
    pub amps_plus: Vec<ModeAmplitude>,
    /// Positive `K-` modes, ascending.
    pub amps_minus: Vec<ModeAmplitude>,
    /// Accumulated odd-sector phase `γ`; the odd component carries
    /// `e^{-iπ/4} e^{-iγ}`.
    pub gamma: f64,
    pub time: f64,
}

impl SystemState {
    pub fn n_sites(&self) -> usize {
        self.grid.n_sites()
    }

    pub fn amps(&self, sector: Sector) -> &[ModeAmplitude] {
        match sector {
            Sector::Plus => &self.amps_plus,
            Sector::Minus => &self.amps_minus,
        }
    }

    /// Largest `||u|² + |v|² - 1|` over all modes.
    pub fn max_norm_drift(&self) -> f64 {
        self.amps_plus
            .iter()
            .chain(&self.amps_minus)
            .map(|a| (a.norm_sqr() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn check_norm(&self) -> Result<(), DynamicsError> {
        let drift = self.max_norm_drift();
        if drift > NORM_TOL {
            Err(DynamicsError::NormDrift(drift))
        } else {
            Ok(())
        }
    }

    fn map_modes<F>(&self, f: F) -> (Vec<ModeAmplitude>, Vec<ModeAmplitude>)
    where
        F: Fn(&ModeAmplitude) -> ModeAmplitude + Sync,
    {
        let plus = self.amps_plus.par_iter().map(&f).collect();
        let minus = self.amps_minus.par_iter().map(&f).collect();
        (plus, minus)
    }
}

/// The fully polarized `|→⟩^{⊗N}`: every mode at `(sin k/2, cos k/2)`.
pub fn init_ferro(grid: &MomentumGrid) -> SystemState {
    let amps = |sector| -> Vec<ModeAmplitude> {
        grid.positive(sector)
            .into_iter()
            .map(|k| {
                let h = k.momentum() / 2.0;
                ModeAmplitude { k, u: C64::new(h.sin(), 0.0), v: C64::new(h.cos(), 0.0) }
            })
            .collect()
    };
    SystemState {
        grid: grid.clone(),
        amps_plus: amps(Sector::Plus),
        amps_minus: amps(Sector::Minus),
        gamma: 0.0,
        time: 0.0,
    }
}

/// `exp(-i h t)` for a Hermitian 2×2 `h`.
pub fn mode_unitary(h: &Mat2, t: f64) -> Result<Mat2, DynamicsError> {
    let scale = h.iter().flatten().map(|z| z.norm()).fold(1.0, f64::max);
    let dev = [(h[0][0] - h[0][0].conj()).norm(), (h[1][1] - h[1][1].conj()).norm(), (h[0][1] - h[1][0].conj()).norm()]
        .into_iter()
        .fold(0.0, f64::max);
    if dev > 1e-12 * scale {
        return Err(DynamicsError::NotHermitian(dev));
    }
    // h = a·1 + bx σx + by σy + bz σz
    let a = 0.5 * (h[0][0].re + h[1][1].re);
    let bz = 0.5 * (h[0][0].re - h[1][1].re);
    let bx = h[0][1].re;
    let by = -h[0][1].im;
    let w = (bx * bx + by * by + bz * bz).sqrt();
    let (c, s_over_w) = if w * t.abs() < 1e-8 {
        let x = w * t;
        (1.0 - x * x / 2.0, t * (1.0 - x * x / 6.0))
    } else {
        ((w * t).cos(), (w * t).sin() / w)
    };
    let i = C64::new(0.0, 1.0);
    let phase = C64::cis(-a * t);
    // cos(wt) - i sin(wt) (b·σ)/w
    let m00 = C64::new(c, 0.0) - i * s_over_w * bz;
    let m11 = C64::new(c, 0.0) + i * s_over_w * bz;
    let m01 = -i * s_over_w * C64::new(bx, -by);
    let m10 = -i * s_over_w * C64::new(bx, by);
    Ok([[phase * m00, phase * m01], [phase * m10, phase * m11]])
}

fn matmul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Diagonal kick generator `F_k = 2 diag(-1, 1)` on a mode pair; the
/// special modes use `diag(-1, 1)`.
fn kick_unitary(phi: f64) -> Mat2 {
    // exp(-i φ/2 · 2 diag(-1, 1))
    let z = C64::new(0.0, 0.0);
    [[C64::cis(phi), z], [z, C64::cis(-phi)]]
}

/// Phase the kick adds to `γ` from the special modes frozen at
/// `|vac⟩_{-π}|0⟩`: `(φ/2)(F_{-π}[vac] + F_0[occ]) = (φ/2)(-1 + 1)`.
pub fn kick_special_phase(phi: f64) -> f64 {
    let f_pi_vac = -1.0;
    let f_0_occ = 1.0;
    0.5 * phi * (f_pi_vac + f_0_occ)
}

/// `γ` rate `½(h1^{-π} + h2^{0})` of the Ising Hamiltonian at field `g`.
pub fn hamiltonian_special_rate(g: f64) -> f64 {
    let e = special_mode_energies(g);
    0.5 * (e.h1_pi + e.h2_0)
}

/// Evolve for `dt` under `H_QIM(g_f)`.
pub fn evolve_quench(state: &SystemState, g_f: f64, dt: f64) -> SystemState {
    let (plus, minus) = state.map_modes(|a| {
        let h = mode_hamiltonian_even(a.k.momentum(), g_f);
        a.apply(&mode_unitary(&h, dt).expect("mode Hamiltonian is real symmetric"))
    });
    SystemState {
        grid: state.grid.clone(),
        amps_plus: plus,
        amps_minus: minus,
        gamma: state.gamma + hamiltonian_special_rate(g_f) * dt,
        time: state.time + dt,
    }
}

/// One period `U(τ) = K_{π(1-ε)} e^{-i H_QIM(g) τ}`.
pub fn evolve_kick_step(state: &SystemState, g: f64, tau: f64, epsilon: f64) -> SystemState {
    let phi = PI * (1.0 - epsilon);
    let kick = kick_unitary(phi);
    let (plus, minus) = state.map_modes(|a| {
        let h = mode_hamiltonian_even(a.k.momentum(), g);
        let u = mode_unitary(&h, tau).expect("mode Hamiltonian is real symmetric");
        a.apply(&matmul(&kick, &u))
    });
    SystemState {
        grid: state.grid.clone(),
        amps_plus: plus,
        amps_minus: minus,
        gamma: state.gamma + hamiltonian_special_rate(g) * tau + kick_special_phase(phi),
        time: state.time + tau,
    }
}

/// Translationally invariant drive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DriverSpec {
    /// Sudden switch of the field from 0 to `g_f`.
    Quench { g_f: f64 },
    /// Periodic delta kicks `K_{π(1-ε)}` after each interval `τ` at field `g`.
    Kick { g: f64, tau: f64, epsilon: f64 },
}

impl DriverSpec {
    /// Per-mode pair-space generator of the Hamiltonian part.
    pub fn mode_generator(&self, k: ModeIndex) -> Mat2 {
        match *self {
            DriverSpec::Quench { g_f } => mode_hamiltonian_even(k.momentum(), g_f),
            DriverSpec::Kick { g, .. } => mode_hamiltonian_even(k.momentum(), g),
        }
    }

    /// Special-mode diagonals `(h1^{-π}, h2^{-π}, h1^0, h2^0)` of the
    /// Hamiltonian part.
    pub fn special_diagonals(&self) -> [f64; 4] {
        let g = match *self {
            DriverSpec::Quench { g_f } => g_f,
            DriverSpec::Kick { g, .. } => g,
        };
        let e = special_mode_energies(g);
        [e.h1_pi, e.h2_pi, e.h1_0, e.h2_0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
        a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| (x - y).norm() < tol)
    }

    fn identity() -> Mat2 {
        [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]
    }

    fn adjoint(m: &Mat2) -> Mat2 {
        [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]]
    }

    /// `exp(-iht)` through the eigen-decomposition of a Hermitian 2×2.
    fn expm_by_eigen(h: &Mat2, t: f64) -> Mat2 {
        let a = h[0][0].re;
        let d = h[1][1].re;
        let b = h[0][1];
        let mean = 0.5 * (a + d);
        let r = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        let (l1, l2) = (mean + r, mean - r);
        let vec_for = |l: f64| -> [C64; 2] {
            // (a - l) x + b y = 0
            let (x, y) = if b.norm() > 1e-14 {
                (b, c(l - a, 0.0))
            } else if (a - l).abs() < 1e-14 {
                (c(1.0, 0.0), c(0.0, 0.0))
            } else {
                (c(0.0, 0.0), c(1.0, 0.0))
            };
            let n = (x.norm_sqr() + y.norm_sqr()).sqrt();
            [x / n, y / n]
        };
        let (v1, v2) = (vec_for(l1), vec_for(l2));
        let mut out = [[c(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = C64::cis(-l1 * t) * v1[i] * v1[j].conj() + C64::cis(-l2 * t) * v2[i] * v2[j].conj();
            }
        }
        out
    }

    #[test]
    fn unitary_at_zero_time_is_identity() {
        let h = mode_hamiltonian_even(0.7, 0.4);
        assert!(close(&mode_unitary(&h, 0.0).unwrap(), &identity(), 1e-15));
    }

    #[test]
    fn unitary_diagonal_half_period() {
        let h = [[c(2.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-2.0, 0.0)]];
        let u = mode_unitary(&h, PI / 2.0).unwrap();
        let minus = [[c(-1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]];
        assert!(close(&u, &minus, 1e-15));
    }

    #[test]
    fn unitary_rejects_non_hermitian() {
        let h = [[c(1.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]];
        assert!(matches!(mode_unitary(&h, 1.0), Err(DynamicsError::NotHermitian(_))));
    }

    proptest! {
        #[test]
        fn unitary_matches_eigen_exponential(
            a in -3.0f64..3.0, d in -3.0f64..3.0, br in -3.0f64..3.0, bi in -3.0f64..3.0, t in -5.0f64..5.0
        ) {
            let h = [[c(a, 0.0), c(br, bi)], [c(br, -bi), c(d, 0.0)]];
            let u = mode_unitary(&h, t).unwrap();
            prop_assert!(close(&matmul(&adjoint(&u), &u), &identity(), 1e-12));
            prop_assert!(close(&u, &expm_by_eigen(&h, t), 1e-11));
        }

        #[test]
        fn quench_composes(g in 0.0f64..2.0, t1 in 0.0f64..5.0, t2 in 0.0f64..5.0) {
            let grid = MomentumGrid::new(10).unwrap();
            let s = init_ferro(&grid);
            let once = evolve_quench(&s, g, t1 + t2);
            let twice = evolve_quench(&evolve_quench(&s, g, t1), g, t2);
            for (a, b) in once.amps_plus.iter().chain(&once.amps_minus).zip(twice.amps_plus.iter().chain(&twice.amps_minus)) {
                prop_assert!((a.u - b.u).norm() < 1e-12 && (a.v - b.v).norm() < 1e-12);
            }
            prop_assert!((once.gamma - twice.gamma).abs() < 1e-12);
        }
    }

    #[test]
    fn init_amplitudes() {
        let grid = MomentumGrid::new(4).unwrap();
        let s = init_ferro(&grid);
        let a = s.amps_plus[0];
        assert!((a.k.momentum() - PI / 4.0).abs() < 1e-15);
        assert!((a.u - c((PI / 8.0).sin(), 0.0)).norm() < 1e-15);
        assert!((a.v - c((PI / 8.0).cos(), 0.0)).norm() < 1e-15);
        assert_eq!(s.amps_minus.len(), 1);
        assert!(s.max_norm_drift() < 1e-15);
        assert_eq!((s.gamma, s.time), (0.0, 0.0));
    }

    #[test]
    fn zero_step_is_identity() {
        let grid = MomentumGrid::new(8).unwrap();
        let s = init_ferro(&grid);
        assert_eq!(evolve_quench(&s, 0.5, 0.0), s);
    }

    #[test]
    fn zero_field_moduli_are_stationary() {
        let grid = MomentumGrid::new(12).unwrap();
        let s0 = init_ferro(&grid);
        for t in [0.3, 1.7, 10.0] {
            let s = evolve_quench(&s0, 0.0, t);
            for (a, b) in s.amps_plus.iter().chain(&s.amps_minus).zip(s0.amps_plus.iter().chain(&s0.amps_minus)) {
                assert!((a.u.norm() - b.u.norm()).abs() < 1e-13);
                assert!((a.v.norm() - b.v.norm()).abs() < 1e-13);
            }
            assert!((s.gamma + 2.0 * t).abs() < 1e-14);
        }
    }

    #[test]
    fn kick_special_phases_cancel() {
        for phi in [0.0, 0.3, PI, PI * 0.98, 5.0] {
            assert_eq!(kick_special_phase(phi), 0.0);
        }
        for g in [0.0, 0.5, 1.0, 2.0] {
            assert_eq!(hamiltonian_special_rate(g), -2.0);
        }
        let s = init_ferro(&MomentumGrid::new(6).unwrap());
        let k = evolve_kick_step(&s, 0.5, 0.5, 0.02);
        assert!((k.gamma + 2.0 * 0.5).abs() < 1e-15);
    }

    #[test]
    fn norm_preserved_over_many_steps() {
        let grid = MomentumGrid::new(16).unwrap();
        let mut s = init_ferro(&grid);
        for _ in 0..10_000 {
            s = evolve_kick_step(&s, 0.5, 0.5, 0.02);
        }
        assert!(s.max_norm_drift() < 1e-9);
        assert!(s.check_norm().is_ok());
        let mut q = init_ferro(&grid);
        for _ in 0..10_000 {
            q = evolve_quench(&q, 1.3, 0.1);
        }
        assert!(q.max_norm_drift() < 1e-9);
    }

    #[test]
    fn unperturbed_kick_has_period_two() {
        let grid = MomentumGrid::new(10).unwrap();
        let s0 = init_ferro(&grid);
        let mut s = s0.clone();
        for n in 1..=100 {
            s = evolve_kick_step(&s, 0.0, 0.5, 0.0);
            if n % 2 == 0 {
                for sector in [Sector::Plus, Sector::Minus] {
                    // one global phase per sector
                    let phase = s.amps(sector)[0].u / s0.amps(sector)[0].u;
                    assert!((phase.norm() - 1.0).abs() < 1e-10);
                    for (a, b) in s.amps(sector).iter().zip(s0.amps(sector)) {
                        assert!((a.u - phase * b.u).norm() < 1e-10);
                        assert!((a.v - phase * b.v).norm() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn sectors_evolve_independently() {
        let grid = MomentumGrid::new(8).unwrap();
        let s0 = init_ferro(&grid);
        let mut tampered = s0.clone();
        tampered.amps_minus[0].u = c(0.0, 1.0);
        tampered.amps_minus[0].v = c(0.0, 0.0);
        let a = evolve_kick_step(&s0, 0.5, 0.5, 0.02);
        let b = evolve_kick_step(&tampered, 0.5, 0.5, 0.02);
        assert_eq!(a.amps_plus, b.amps_plus);
        assert_eq!(a.amps_minus[1..], b.amps_minus[1..]);
    }

    #[test]
    fn driver_generators() {
        let grid = MomentumGrid::new(6).unwrap();
        let k = grid.positive(Sector::Plus)[1];
        let q = DriverSpec::Quench { g_f: 0.7 };
        assert_eq!(q.mode_generator(k), mode_hamiltonian_even(k.momentum(), 0.7));
        let d = DriverSpec::Kick { g: 0.5, tau: 0.5, epsilon: 0.02 }.special_diagonals();
        assert_eq!(d, [-1.0, 1.0, 3.0, -3.0]);
    }
}
