//! Pfaffian engine against exact diagonalization.
//!
//! Each case evolves the momentum-space state and the full spin-space state
//! side by side and compares site-summed magnetizations. Term diagnostics
//! rebuild `|A⟩` and `|B⟩` densely from the same amplitudes and apply `c_1`
//! in the spin basis, so a wrong sign in one term family shows up in that
//! family alone.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{DriverSpec, SystemState};
use crate::model::MomentumGrid;
use crate::observables::{c1_terms, magnetization_z, states_along, C1Terms, ObservableError, Schedule};
use crate::oracle_ed::{
    apply_kick, apply_site_annihilation, evolve_exact, ferro_right, sector_components, total_magnetization, DenseState, OracleError,
    SpectralHamiltonian,
};

/// Pointwise tolerance on `|M^Pf - M^ED|/N`.
pub const VALIDATION_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ValidationError {
    #[error("ring size {0} is unsupported; validation needs an even N in 4..=12")]
    RingSize(usize),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Observable(#[from] ObservableError),
}

/// Deliberate defects for negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mutation {
    #[default]
    None,
    /// Negate the even-pair-breaking term family.
    FlipTerm3,
}

impl Mutation {
    fn apply(self, t: C1Terms) -> C1Terms {
        match self {
            Mutation::None => t,
            Mutation::FlipTerm3 => C1Terms { term3: -t.term3, ..t },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationCase {
    pub n_sites: usize,
    pub driver: DriverSpec,
    pub schedule: Schedule,
}

impl ValidationCase {
    pub fn label(&self) -> String {
        match self.driver {
            DriverSpec::Quench { g_f } => format!("quench N={} g_f={g_f}", self.n_sites),
            DriverSpec::Kick { g, tau, epsilon } => format!("kick N={} g={g} tau={tau} eps={epsilon}", self.n_sites),
        }
    }
}

/// Largest deviations of the term families from their dense references.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TermDiagnostics {
    /// `term1 + term2` against `½ e^{-iπ/4} e^{-iγ} ⟨A|c_1|B⟩`.
    pub a_to_b: f64,
    /// `term3` against `½ e^{iπ/4} e^{iγ} ⟨B|c_1|A⟩`.
    pub b_to_a: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub label: String,
    pub n_sites: usize,
    pub driver: DriverSpec,
    pub samples: usize,
    pub max_dev_mx: f64,
    pub max_dev_my: f64,
    pub max_dev_mz: f64,
    pub terms: TermDiagnostics,
    pub passed: bool,
}

impl CaseReport {
    pub fn max_dev(&self) -> f64 {
        self.max_dev_mx.max(self.max_dev_my).max(self.max_dev_mz)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub tolerance: f64,
    pub mutation: Mutation,
    pub cases: Vec<CaseReport>,
    pub passed: bool,
}

impl ValidationReport {
    pub fn failures(&self) -> impl Iterator<Item = &CaseReport> {
        self.cases.iter().filter(|c| !c.passed)
    }
}

/// Quench at `g_f = 0.5` for `N ∈ sizes`, `t = 0, 0.5, …, 10`, plus the
/// N = 8 kick protocol over 50 kicks when 8 is among the sizes.
pub fn default_suite(sizes: &[usize]) -> Vec<ValidationCase> {
    let times: Vec<f64> = (0..=20).map(|i| 0.5 * i as f64).collect();
    let mut cases: Vec<ValidationCase> = sizes
        .iter()
        .map(|&n| ValidationCase { n_sites: n, driver: DriverSpec::Quench { g_f: 0.5 }, schedule: Schedule::Times(times.clone()) })
        .collect();
    if sizes.contains(&8) {
        cases.push(ValidationCase {
            n_sites: 8,
            driver: DriverSpec::Kick { g: 0.5, tau: 0.5, epsilon: 0.02 },
            schedule: Schedule::Kicks((1..=50).collect()),
        });
    }
    cases
}

fn ed_states(case: &ValidationCase) -> Result<Vec<DenseState>, ValidationError> {
    let n = case.n_sites;
    match (case.driver, &case.schedule) {
        (DriverSpec::Quench { g_f }, Schedule::Times(times)) => {
            let h = SpectralHamiltonian::new(n, g_f)?;
            let init = ferro_right(n);
            Ok(times.iter().map(|&t| evolve_exact(&init, &h, t)).collect::<Result<_, _>>()?)
        }
        (DriverSpec::Kick { g, tau, epsilon }, Schedule::Kicks(kicks)) => {
            let h = SpectralHamiltonian::new(n, g)?;
            let phi = std::f64::consts::PI * (1.0 - epsilon);
            let mut s = ferro_right(n);
            let mut done = 0;
            let mut out = Vec::with_capacity(kicks.len());
            for &target in kicks {
                while done < target {
                    s = apply_kick(&evolve_exact(&s, &h, tau)?, phi);
                    done += 1;
                }
                out.push(s.clone());
            }
            Ok(out)
        }
        _ => Err(ObservableError::ScheduleKind.into()),
    }
}

/// Dense references for the two halves of `⟨c_1⟩`.
fn dense_terms(state: &SystemState) -> (C64, C64) {
    let (a, b) = sector_components(state);
    let q = C64::cis(-std::f64::consts::FRAC_PI_4 - state.gamma);
    let a_c1_b = a.inner(&apply_site_annihilation(&b, 1));
    let b_c1_a = b.inner(&apply_site_annihilation(&a, 1));
    (0.5 * q * a_c1_b, 0.5 * q.conj() * b_c1_a)
}

pub fn validate_case(case: &ValidationCase, mutation: Mutation) -> Result<CaseReport, ValidationError> {
    let n = case.n_sites;
    if !(4..=12).contains(&n) || n % 2 != 0 {
        return Err(ValidationError::RingSize(n));
    }
    let grid = MomentumGrid::new(n).map_err(|_| ValidationError::RingSize(n))?;
    let states = states_along(&case.driver, &grid, &case.schedule)?;
    let reference = ed_states(case)?;
    let nf = n as f64;
    let mut report = CaseReport {
        label: case.label(),
        n_sites: n,
        driver: case.driver,
        samples: states.len(),
        max_dev_mx: 0.0,
        max_dev_my: 0.0,
        max_dev_mz: 0.0,
        terms: TermDiagnostics::default(),
        passed: false,
    };
    for (s, ed) in states.iter().zip(&reference) {
        let terms = mutation.apply(c1_terms(s)?);
        let c1 = terms.sum();
        let exact = total_magnetization(ed, s.time);
        report.max_dev_mx = report.max_dev_mx.max((2.0 * nf * c1.re - exact.mx).abs() / nf);
        report.max_dev_my = report.max_dev_my.max((-2.0 * nf * c1.im - exact.my).abs() / nf);
        report.max_dev_mz = report.max_dev_mz.max((magnetization_z(s) - exact.mz).abs() / nf);
        let (ab, ba) = dense_terms(s);
        report.terms.a_to_b = report.terms.a_to_b.max((terms.a_to_b() - ab).norm());
        report.terms.b_to_a = report.terms.b_to_a.max((terms.b_to_a() - ba).norm());
    }
    report.passed = report.max_dev() < VALIDATION_TOL;
    Ok(report)
}

pub fn validate_suite(cases: &[ValidationCase], mutation: Mutation) -> Result<ValidationReport, ValidationError> {
    let cases = cases.iter().map(|c| validate_case(c, mutation)).collect::<Result<Vec<_>, _>>()?;
    let passed = cases.iter().all(|c| c.passed);
    Ok(ValidationReport { tolerance: VALIDATION_TOL, mutation, cases, passed })
}
