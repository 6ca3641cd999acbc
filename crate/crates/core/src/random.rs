//! Random channel ingredients for property tests and sweeps.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::dephase::PhaseWeight;
use crate::entangle::EnvironmentModel;
use crate::error::Result;
use crate::qcore::{CMatrix, DensityOperator, UnitaryOperator};

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im) / std::f64::consts::SQRT_2
    })
}

/// Haar-distributed d×d unitary (QR of a Ginibre matrix with R's diagonal
/// phases absorbed into Q).
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> UnitaryOperator {
    let qr = ginibre(d, d, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            Complex64::ONE
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    UnitaryOperator::new(q).expect("QR factor is unitary")
}

/// Density operator A·A†/tr(A·A†) with A a d×rank Ginibre matrix.
pub fn random_density<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> DensityOperator {
    let a = ginibre(d, rank.max(1), rng);
    let mut m = &a * a.adjoint();
    let tr = m.trace().re;
    m.unscale_mut(tr);
    let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    DensityOperator::new(m).expect("Gram matrix is a density operator")
}

/// Environment of dimension `d` with a full-rank random state and a Haar
/// unitary.
pub fn random_environment<R: Rng + ?Sized>(d: usize, rng: &mut R) -> EnvironmentModel {
    let rank = rng.random_range(1..=d);
    EnvironmentModel::new(random_density(d, rank, rng), haar_unitary(d, rng)).expect("matching dimensions")
}

/// `n` atoms at uniform phases with exponentially distributed masses.
pub fn random_atoms<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PhaseWeight> {
    let raw: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            let phase = rng.random_range(-PI..PI);
            let mass: f64 = Exp1.sample(rng);
            (phase, mass + 1e-3)
        })
        .collect();
    let total: f64 = raw.iter().map(|a| a.1).sum();
    PhaseWeight::atoms(raw.into_iter().map(|(p, w)| (p, w / total)))
}
