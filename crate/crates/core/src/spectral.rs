//! Eigenphases of unitary operators, with near-degenerate phases merged.

use nalgebra::linalg::Schur;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phase::{circular_distance, wrap};
use crate::qcore::{CMatrix, CVector, DensityOperator, UnitaryOperator};

/// Eigenphases closer than this on the circle are treated as one.
pub const MERGE_TOL: f64 = 1e-8;

/// Largest accepted residual |U q − λ q|.
const RESIDUAL_TOL: f64 = 1e-8;

/// One eigenspace of a unitary: a phase and an orthonormal basis of vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenspace {
    pub phase: f64,
    pub vectors: Vec<CVector>,
}

impl Eigenspace {
    /// tr(ρ P), with P the projector onto this eigenspace.
    pub fn weight(&self, rho: &DensityOperator) -> f64 {
        self.vectors
            .iter()
            .map(|v| (v.adjoint() * rho.matrix() * v)[(0, 0)].re)
            .sum()
    }
}

/// Eigenvalues and orthonormal eigenvectors of `u`, one per column.
///
/// A normal matrix has a diagonal Schur form, so the Schur vectors are
/// eigenvectors, including inside degenerate subspaces.
pub fn eigenpairs(u: &UnitaryOperator) -> Result<Vec<(Complex64, CVector)>> {
    let n = u.dim();
    if u.is_diagonal() {
        return Ok((0..n)
            .map(|k| {
                let mut e = CVector::zeros(n);
                e[k] = Complex64::ONE;
                (u.matrix()[(k, k)], e)
            })
            .collect());
    }
    let schur = Schur::try_new(u.matrix().clone(), 1e-15, 100_000)
        .ok_or_else(|| Error::Eigen("Schur iteration did not converge".into()))?;
    let (q, t): (CMatrix, CMatrix) = schur.unpack();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = t[(k, k)];
        let v = q.column(k).into_owned();
        let residual = (u.matrix() * &v - &v * lambda).norm();
        if residual > RESIDUAL_TOL {
            return Err(Error::Eigen(format!(
                "eigenvector {k} has residual {residual:e}; input is not normal"
            )));
        }
        out.push((lambda, v));
    }
    Ok(out)
}

/// Fixes the arbitrary phase of an eigenvector: the first component with
/// modulus above 1e-12 is made real and positive.
pub fn canonical_phase(v: &CVector) -> CVector {
    match v.iter().find(|z| z.norm() > 1e-12) {
        Some(z) => v * (z.conj() / z.norm()),
        None => v.clone(),
    }
}

/// Eigenspaces of `u`, phases within [`MERGE_TOL`] merged.
pub fn eigenspaces(u: &UnitaryOperator) -> Result<Vec<Eigenspace>> {
    let pairs = eigenpairs(u)?;
    let n = pairs.len();
    let phases: Vec<f64> = pairs.iter().map(|(l, _)| wrap(l.arg())).collect();

    // union-find over pairs of close phases
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if circular_distance(phases[i], phases[j]) < MERGE_TOL {
                let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }

    let mut spaces: Vec<(usize, Complex64, Vec<CVector>)> = Vec::new();
    for (i, (lambda, v)) in pairs.into_iter().enumerate() {
        let r = root(&mut parent, i);
        let v = canonical_phase(&v);
        match spaces.iter_mut().find(|(id, _, _)| *id == r) {
            Some((_, sum, vs)) => {
                *sum += lambda / lambda.norm();
                vs.push(v);
            }
            None => spaces.push((r, lambda / lambda.norm(), vec![v])),
        }
    }
    Ok(spaces
        .into_iter()
        .map(|(_, sum, vectors)| Eigenspace {
            phase: wrap(sum.arg()),
            vectors,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn swap_matrix_has_plus_minus_one() {
        let u = UnitaryOperator::new(CMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        ))
        .unwrap();
        let mut spaces = eigenspaces(&u).unwrap();
        spaces.sort_by(|a, b| a.phase.abs().total_cmp(&b.phase.abs()));
        assert_eq!(spaces.len(), 2);
        assert!(spaces[0].phase.abs() < 1e-12);
        assert!((spaces[1].phase.abs() - PI).abs() < 1e-12);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((&spaces[0].vectors[0] - CVector::from_column_slice(&[c(s, 0.0), c(s, 0.0)])).norm() < 1e-12);
    }

    #[test]
    fn degenerate_phases_merge() {
        let u = UnitaryOperator::from_phases(&[0.5, 0.5 + 1e-10, -1.0]);
        let spaces = eigenspaces(&u).unwrap();
        assert_eq!(spaces.len(), 2);
        let merged = spaces.iter().find(|s| s.vectors.len() == 2).unwrap();
        assert!((merged.phase - 0.5).abs() < 1e-9);
        let rho = DensityOperator::diagonal(&[0.2, 0.3, 0.5]).unwrap();
        assert!((merged.weight(&rho) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn merge_wraps_across_pi() {
        let u = UnitaryOperator::from_phases(&[PI, -PI + 1e-10]);
        assert_eq!(eigenspaces(&u).unwrap().len(), 1);
    }
}
