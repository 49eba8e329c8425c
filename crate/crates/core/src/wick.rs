//! Vacuum expectation values of products of linear fermion operators.
//!
//! Every operator is a linear form in the momentum-mode operators
//! `c_{kσ}`, `c†_{kσ}` of either parity sector. All of them act on one Fock
//! space with the common real-space vacuum, so Wick's theorem applies
//! across sectors: `⟨vac| a_1 ⋯ a_{2n} |vac⟩ = Pf M` with
//! `M_ij = ⟨vac| a_i a_j |vac⟩` for `i < j`.

use num_complex::Complex64 as C64;
use thiserror::Error;

pub use crate::model::{ModeIndex, Sector};
use crate::pfaffian::{pfaffian, PfaffianError, SkewMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WickError {
    #[error(transparent)]
    Pfaffian(#[from] PfaffianError),
    #[error("mode amplitude |v| = {0:e} is too small for the division form")]
    SmallAmplitude(f64),
    #[error("modes belong to rings of different sizes ({0} vs {1})")]
    RingMismatch(usize, usize),
}

/// `⟨vac| c_k c†_{kp} |vac⟩`.
pub fn contraction_kernel(k: ModeIndex, kp: ModeIndex) -> C64 {
    debug_assert_eq!(k.n_sites(), kp.n_sites());
    if k.sector() == kp.sector() {
        return if k == kp { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
    }
    let n = k.n_sites() as f64;
    let phase = (k.grid_index() - kp.grid_index()) as f64 * std::f64::consts::PI / n;
    C64::new(2.0 / n, 0.0) / (C64::cis(phase) - 1.0)
}

/// `Σ_k ann_k c_k + Σ_k cre_k c†_k`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearOperator {
    pub ann: Vec<(ModeIndex, C64)>,
    pub cre: Vec<(ModeIndex, C64)>,
}

impl LinearOperator {
    pub fn annihilate(k: ModeIndex) -> Self {
        Self { ann: vec![(k, C64::new(1.0, 0.0))], cre: vec![] }
    }

    pub fn create(k: ModeIndex) -> Self {
        Self { ann: vec![], cre: vec![(k, C64::new(1.0, 0.0))] }
    }

    /// `ξ†_k = u c_k - v c†_{-k}`.
    pub fn xi_dagger(k: ModeIndex, u: C64, v: C64) -> Self {
        Self { ann: vec![(k, u)], cre: vec![(k.neg(), -v)] }
    }

    /// `η†_k = u c_{-k} + v c†_k`.
    pub fn eta_dagger(k: ModeIndex, u: C64, v: C64) -> Self {
        Self { ann: vec![(k.neg(), u)], cre: vec![(k, v)] }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            ann: self.cre.iter().map(|&(k, z)| (k, z.conj())).collect(),
            cre: self.ann.iter().map(|&(k, z)| (k, z.conj())).collect(),
        }
    }

    pub fn scaled(mut self, z: C64) -> Self {
        for (_, c) in self.ann.iter_mut().chain(self.cre.iter_mut()) {
            *c *= z;
        }
        self
    }

    pub fn plus(mut self, other: &LinearOperator) -> Self {
        self.ann.extend_from_slice(&other.ann);
        self.cre.extend_from_slice(&other.cre);
        self
    }
}

/// `⟨vac| a b |vac⟩`; only the annihilation part of `a` against the
/// creation part of `b` survives.
pub fn contract_pair(a: &LinearOperator, b: &LinearOperator) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for &(k, alpha) in &a.ann {
        for &(kp, beta) in &b.cre {
            acc += alpha * beta * contraction_kernel(k, kp);
        }
    }
    acc
}

/// Ordered operator product.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FermionWord {
    pub ops: Vec<LinearOperator>,
}

impl FermionWord {
    pub fn new(ops: Vec<LinearOperator>) -> Self {
        Self { ops }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// The contraction matrix `M_ij = ⟨a_i a_j⟩`, `i < j`.
    pub fn contraction_matrix(&self) -> Result<SkewMatrix, WickError> {
        Ok(SkewMatrix::from_upper(self.ops.len(), |i, j| contract_pair(&self.ops[i], &self.ops[j]))?)
    }
}

/// `⟨vac| w |vac⟩`. Odd words vanish by parity.
pub fn vacuum_expectation(w: &FermionWord) -> Result<C64, WickError> {
    if w.is_empty() {
        return Ok(C64::new(1.0, 0.0));
    }
    if w.len() % 2 == 1 {
        return Ok(C64::new(0.0, 0.0));
    }
    Ok(pfaffian(&w.contraction_matrix()?))
}

/// Mode label with BCS amplitudes `u + v c†_k c†_{-k}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeAmps {
    pub k: ModeIndex,
    pub u: C64,
    pub v: C64,
}

/// `I_{m,n} = Π_l ⟨X_{p_l}| Π_j |X_{k_j}⟩` through the explicit
/// `(-1)^m / (Π v*_p Π v_k) · Pf A^{(m,n)}` construction.
///
/// Kept as an independent check of the general evaluator; it divides by
/// every `v` and fails for `|v| < 1e-12`.
pub fn inner_product_imn(bra: &[ModeAmps], ket: &[ModeAmps]) -> Result<C64, WickError> {
    if let Some(first) = bra.iter().chain(ket).next() {
        let n = first.k.n_sites();
        if let Some(bad) = bra.iter().chain(ket).find(|m| m.k.n_sites() != n) {
            return Err(WickError::RingMismatch(n, bad.k.n_sites()));
        }
    }
    for m in bra.iter().chain(ket) {
        if m.v.norm() < 1e-12 {
            return Err(WickError::SmallAmplitude(m.v.norm()));
        }
    }
    let (mm, nn) = (bra.len(), ket.len());
    if mm + nn == 0 {
        return Ok(C64::new(1.0, 0.0));
    }
    let f = |p: ModeIndex, k: ModeIndex| contraction_kernel(p, k);
    let dim = 2 * (mm + nn);
    let mut a = vec![C64::new(0.0, 0.0); dim * dim];
    let mut set = |i: usize, j: usize, z: C64| {
        a[i * dim + j] = z;
        a[j * dim + i] = -z;
    };
    // zero-based versions of the 1-based index formulas
    for (l, p) in bra.iter().enumerate() {
        set(2 * l, 2 * l + 1, -p.u.conj() * p.v.conj());
    }
    for (j, k) in ket.iter().enumerate() {
        set(2 * mm + 2 * j, 2 * mm + 2 * j + 1, k.u * k.v);
    }
    for (l, p) in bra.iter().enumerate() {
        for (j, k) in ket.iter().enumerate() {
            let vv = p.v.conj() * k.v;
            set(2 * l, 2 * mm + 2 * j, vv * f(p.k.neg(), k.k.neg()));
            set(2 * l, 2 * mm + 2 * j + 1, -vv * f(p.k.neg(), k.k));
            set(2 * l + 1, 2 * mm + 2 * j, -vv * f(p.k, k.k.neg()));
            set(2 * l + 1, 2 * mm + 2 * j + 1, vv * f(p.k, k.k));
        }
    }
    let pf = pfaffian(&SkewMatrix::new(dim, a)?);
    let denom: C64 = bra.iter().map(|p| p.v.conj()).product::<C64>() * ket.iter().map(|k| k.v).product::<C64>();
    let sign = if mm % 2 == 0 { 1.0 } else { -1.0 };
    Ok(pf * sign / denom)
}

/// The word `Π_l (ξ_{p_l} η_{p_l}) Π_j (ξ†_{k_j} η†_{k_j})` whose vacuum
/// expectation is `Pf A^{(m,n)}`.
pub fn bogoliubov_word(bra: &[ModeAmps], ket: &[ModeAmps]) -> FermionWord {
    let mut ops = Vec::with_capacity(2 * (bra.len() + ket.len()));
    for p in bra {
        ops.push(LinearOperator::xi_dagger(p.k, p.u, p.v).adjoint());
        ops.push(LinearOperator::eta_dagger(p.k, p.u, p.v).adjoint());
    }
    for k in ket {
        ops.push(LinearOperator::xi_dagger(k.k, k.u, k.v));
        ops.push(LinearOperator::eta_dagger(k.k, k.u, k.v));
    }
    FermionWord::new(ops)
}
