//! Longitudinal magnetization dynamics of the periodic transverse-field
//! Ising ring from the fully polarized state, computed with momentum-space
//! Wick contractions and Pfaffians.

pub mod analysis;
pub mod dynamics;
pub mod model;
pub mod observables;
pub mod oracle_ed;
pub mod pfaffian;
pub mod validate;
pub mod wick;

pub use dynamics::{init_ferro, DriverSpec, ModeAmplitude, SystemState};
pub use model::{ModeIndex, MomentumGrid, Sector};
pub use num_complex::Complex64 as C64;
pub use observables::{expectation_c1, magnetization, run_series, MagnetizationSample, Schedule};
pub use pfaffian::{pfaffian, SkewMatrix};
