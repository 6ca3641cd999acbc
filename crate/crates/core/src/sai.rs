//! Conversions between the two pictures and a certificate that two
//! descriptions induce the same system channel.
//!
//! An environment becomes a weight by reading ε = tr(U_env ρ_env) in the
//! eigenbasis of U_env: each eigenphase φ_k carries the mass ⟨e_k|ρ_env|e_k⟩.
//! A weight becomes an environment by putting its atoms on the diagonal,
//! U = diag(e^{iφ_k}) and ρ_env = diag(w_k).
//!
//! Equivalence here means equal reduced states ρ_ε on a (θ, φ) grid. The
//! joint states are different physics, see [`crate::eraser`].

use std::f64::consts::PI;

use crate::dephase::{apply_phase_kicks, check_normalized, epsilon_of_weight, PhaseWeight, DEFAULT_GRID, MASS_TOL};
use crate::entangle::{entangle_joint, epsilon_of_env, reduced_system, EnvironmentModel};
use crate::error::{Error, Result};
use crate::qcore::{DensityOperator, Epsilon, UnitaryOperator, WaySuperposition};
use crate::report::Report;
use crate::spectral::eigenspaces;

/// Eigenspace masses below this are dropped.
pub const DROP_TOL: f64 = 1e-14;

/// Default pass threshold of [`certify_equivalence`].
pub const CERT_TOL: f64 = 1e-8;

/// Weight equivalent to `m`: one atom per eigenspace of U_env, heaviest
/// first.
pub fn env_to_weight(m: &EnvironmentModel) -> Result<PhaseWeight> {
    let mut atoms: Vec<(f64, f64)> = eigenspaces(m.u_env())?
        .iter()
        .map(|space| (space.phase, space.weight(m.rho_env())))
        .filter(|&(_, w)| w >= DROP_TOL)
        .collect();
    atoms.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.total_cmp(&b.0)));
    let w = PhaseWeight::atoms(atoms)?;
    let mass = check_normalized(&w);
    if (mass - 1.0).abs() > 1e-10 {
        return Err(Error::Eigen(format!("eigenspace masses sum to {mass}")));
    }
    Ok(w)
}

/// Diagonal environment equivalent to `w`, discretizing continuous weights
/// with [`DEFAULT_GRID`] atoms.
pub fn weight_to_env(w: &PhaseWeight) -> Result<EnvironmentModel> {
    weight_to_env_with(w, DEFAULT_GRID)
}

pub fn weight_to_env_with(w: &PhaseWeight, grid: usize) -> Result<EnvironmentModel> {
    let mass = check_normalized(w);
    if (mass - 1.0).abs() > MASS_TOL {
        return Err(Error::Unnormalized(mass));
    }
    let atoms = w.to_atoms(grid)?;
    let total: f64 = atoms.iter().map(|a| a.weight).sum();
    let phases: Vec<f64> = atoms.iter().map(|a| a.phase).collect();
    let masses: Vec<f64> = atoms.iter().map(|a| a.weight / total).collect();
    EnvironmentModel::new(
        DensityOperator::diagonal(&masses)?,
        UnitaryOperator::from_phases(&phases),
    )
}

/// Either description of a dephasing channel.
#[derive(Debug, Clone, PartialEq)]
pub enum Description {
    Kicks(PhaseWeight),
    Environment(EnvironmentModel),
}

impl Description {
    pub fn epsilon(&self) -> Result<Epsilon> {
        match self {
            Description::Kicks(w) => epsilon_of_weight(w),
            Description::Environment(m) => epsilon_of_env(m),
        }
    }

    /// The reduced state this description produces from ψ₀: through ε for
    /// kicks, through the joint state and a partial trace for environments.
    pub fn induced_state(&self, psi0: &WaySuperposition) -> Result<DensityOperator> {
        match self {
            Description::Kicks(w) => apply_phase_kicks(psi0, w),
            Description::Environment(m) => reduced_system(&entangle_joint(psi0, m), m.dim()),
        }
    }

    /// The other picture of the same channel.
    pub fn converted(&self) -> Result<Description> {
        Ok(match self {
            Description::Kicks(w) => Description::Environment(weight_to_env(w)?),
            Description::Environment(m) => Description::Kicks(env_to_weight(m)?),
        })
    }
}

impl From<PhaseWeight> for Description {
    fn from(w: PhaseWeight) -> Self {
        Description::Kicks(w)
    }
}

impl From<EnvironmentModel> for Description {
    fn from(m: EnvironmentModel) -> Self {
        Description::Environment(m)
    }
}

/// Preparation angles on which two channels are compared.
#[derive(Debug, Clone, PartialEq)]
pub struct CertGrid {
    pub thetas: Vec<f64>,
    pub phis: Vec<f64>,
}

impl Default for CertGrid {
    /// 9 θ from 0.1 to π − 0.1 and 8 φ spaced by π/4.
    fn default() -> Self {
        let thetas = (0..9).map(|k| 0.1 + (PI - 0.2) * k as f64 / 8.0).collect();
        let phis = crate::qcore::probe_grid(8);
        Self { thetas, phis }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub eps_a: Epsilon,
    pub eps_b: Epsilon,
    pub max_channel_deviation: f64,
    pub grid: (usize, usize),
    pub tolerance: f64,
    pub pass: bool,
}

impl Certificate {
    pub fn report(&self) -> Report {
        let mut r = Report::new();
        r.pair("eps_a", self.eps_a.modulus(), self.eps_a.delta())
            .pair("eps_b", self.eps_b.modulus(), self.eps_b.delta())
            .real("max_channel_deviation", self.max_channel_deviation)
            .ints("grid", &[self.grid.0 as u64, self.grid.1 as u64])
            .real("tolerance", self.tolerance)
            .flag("pass", self.pass);
        r
    }
}

/// Compares the reduced states of `a` and `b` on `grid` at [`CERT_TOL`].
pub fn certify_equivalence(a: &Description, b: &Description, grid: &CertGrid) -> Result<Certificate> {
    certify_equivalence_at(a, b, grid, CERT_TOL)
}

pub fn certify_equivalence_at(
    a: &Description,
    b: &Description,
    grid: &CertGrid,
    tolerance: f64,
) -> Result<Certificate> {
    let mut worst: f64 = 0.0;
    for &theta in &grid.thetas {
        for &phi in &grid.phis {
            let psi = WaySuperposition::new(theta, phi)?;
            let dev = a.induced_state(&psi)?.max_deviation(&b.induced_state(&psi)?);
            worst = worst.max(dev);
        }
    }
    Ok(Certificate {
        eps_a: a.epsilon()?,
        eps_b: b.epsilon()?,
        max_channel_deviation: worst,
        grid: (grid.thetas.len(), grid.phis.len()),
        tolerance,
        pass: worst <= tolerance,
    })
}
