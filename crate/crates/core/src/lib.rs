//! Two ways to lose interference fringes in a two-way interferometer,
//! built as executable channels on a qubit of "ways".
//!
//! * [`dephase`]: random classical phase kicks drawn from a weight Ω(φ′).
//! * [`entangle`]: a which-way environment (ρ_env, U_env) that is traced out.
//!
//! Both attenuate the coherence by the same complex factor ε, which
//! [`sai`] converts between, and [`eraser`] shows where they part ways:
//! only the entangled environment can be measured to sort the runs into
//! subensembles with restored fringes. [`fock`] checks the coherent-state
//! phase-integral constructions numerically and [`scenario`] runs
//! configured experiments, analytically or by Monte Carlo.

pub mod dephase;
pub mod entangle;
pub mod eraser;
pub mod error;
pub mod estimate;
pub mod fock;
pub mod phase;
pub mod qcore;
pub mod quadrature;
pub mod random;
pub mod report;
pub mod rng;
pub mod sai;
pub mod scenario;
pub mod spectral;

pub use error::{Error, Result};

/// Tolerance for the density, unitary and basis invariants.
pub const VALID_TOL: f64 = 1e-10;

/// Tolerance for entrywise equality of two channels' outputs.
pub const EQ_TOL: f64 = 1e-9;
