//! The entanglement picture: the system's ways become correlated with an
//! environment (ρ_env, U_env) and the coherence is attenuated by
//! ε = tr(U_env ρ_env) once the environment is traced out.
//!
//! The coupling is C = |ψ₁⟩⟨ψ₁| ⊗ U_env† + |ψ₂⟩⟨ψ₂| ⊗ 1. With this branch
//! assignment the reduced coherence ρ₂₁ picks up tr(U_env ρ_env) itself
//! rather than its conjugate, and the eigenbasis subensembles of the
//! detector carry the fringe shifts φ + δ_ε and φ + δ_ε + π.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::{
    partial_trace_env, tensor_product, CMatrix, DensityOperator, Epsilon, UnitaryOperator, WaySuperposition,
};

/// An environment state together with the unitary that marks the first way.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentModel {
    rho_env: DensityOperator,
    u_env: UnitaryOperator,
}

impl EnvironmentModel {
    pub fn new(rho_env: DensityOperator, u_env: UnitaryOperator) -> Result<Self> {
        if rho_env.dim() != u_env.dim() {
            return Err(Error::DimensionMismatch {
                expected: rho_env.dim(),
                actual: u_env.dim(),
            });
        }
        Ok(Self { rho_env, u_env })
    }

    pub fn dim(&self) -> usize {
        self.rho_env.dim()
    }

    pub fn rho_env(&self) -> &DensityOperator {
        &self.rho_env
    }

    pub fn u_env(&self) -> &UnitaryOperator {
        &self.u_env
    }
}

/// ε = tr(U_env ρ_env).
pub fn epsilon_of_env(m: &EnvironmentModel) -> Result<Epsilon> {
    let u = m.u_env.matrix();
    let rho = m.rho_env.matrix();
    let n = m.dim();
    let tr: Complex64 = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| u[(i, j)] * rho[(j, i)])
        .sum();
    Epsilon::from_complex(tr)
}

/// Two-level environment in |0⟩ with
/// U|0⟩ = ε|0⟩ + e^{iδ}√(1−|ε|²)|1⟩ and U|1⟩ = e^{iδ}√(1−|ε|²)|0⟩ − ε|1⟩.
pub fn canonical_two_level(eps_modulus: f64, delta: f64) -> Result<EnvironmentModel> {
    let eps = Epsilon::new(eps_modulus, delta)?;
    let e = eps.value();
    let s = Complex64::from_polar((1.0 - eps_modulus * eps_modulus).max(0.0).sqrt(), delta);
    // columns are U|0⟩ and U|1⟩
    let u = DMatrix::from_row_slice(2, 2, &[e, s, s, -e]);
    EnvironmentModel::new(DensityOperator::diagonal(&[1.0, 0.0])?, UnitaryOperator::new(u)?)
}

/// The way-controlled coupling C on system ⊗ environment, system first.
pub fn controlled_coupling(m: &EnvironmentModel) -> UnitaryOperator {
    let d = m.dim();
    let mut c = CMatrix::identity(2 * d, 2 * d);
    c.view_mut((0, 0), (d, d)).copy_from(&m.u_env.matrix().adjoint());
    UnitaryOperator::from_matrix_unchecked(c)
}

/// C X C† for the block-diagonal C = diag(V, 1), done block by block.
fn conjugate_by_coupling(joint: &CMatrix, v: &UnitaryOperator) -> CMatrix {
    let d = v.dim();
    let mut out = joint.clone();
    let x00 = joint.view((0, 0), (d, d)).into_owned();
    let x01 = joint.view((0, d), (d, d)).into_owned();
    let x10 = joint.view((d, 0), (d, d)).into_owned();
    out.view_mut((0, 0), (d, d))
        .copy_from(&v.apply_right_adjoint(&v.apply_left(&x00)));
    out.view_mut((0, d), (d, d)).copy_from(&v.apply_left(&x01));
    out.view_mut((d, 0), (d, d)).copy_from(&v.apply_right_adjoint(&x10));
    out
}

/// C (ρ₀ ⊗ ρ_env) C†.
pub fn entangle_joint(psi0: &WaySuperposition, m: &EnvironmentModel) -> DensityOperator {
    let product = tensor_product(&psi0.density(), &m.rho_env);
    let v = m.u_env.adjoint();
    DensityOperator::from_matrix_unchecked(conjugate_by_coupling(product.matrix(), &v))
}

/// Traces the environment out of a joint system–environment operator.
pub fn reduced_system(joint: &DensityOperator, env_dim: usize) -> Result<DensityOperator> {
    partial_trace_env(joint, 2, env_dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{dephased_density, max_abs_diff, CVector};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Joint state written out block by block:
    /// |ψ₁⟩⟨ψ₁| ⊗ U†ρU, |ψ₂⟩⟨ψ₂| ⊗ ρ, |ψ₁⟩⟨ψ₂| ⊗ U†ρ, |ψ₂⟩⟨ψ₁| ⊗ ρU.
    fn blockwise_joint(psi: &WaySuperposition, m: &EnvironmentModel) -> CMatrix {
        let [p1, p2] = psi.populations();
        let half = psi.theta() / 2.0;
        let coh = Complex64::from_polar(half.sin() * half.cos(), psi.phi());
        let u = m.u_env().matrix();
        let rho = m.rho_env().matrix();
        let d = m.dim();
        let mut out = CMatrix::zeros(2 * d, 2 * d);
        out.view_mut((0, 0), (d, d))
            .copy_from(&(u.adjoint() * rho * u).scale(p1));
        out.view_mut((d, d), (d, d)).copy_from(&rho.scale(p2));
        out.view_mut((0, d), (d, d))
            .copy_from(&((u.adjoint() * rho) * coh.conj()));
        out.view_mut((d, 0), (d, d)).copy_from(&((rho * u) * coh));
        out
    }

    #[test]
    fn epsilon_of_env_examples() {
        let rho = DensityOperator::diagonal(&[0.3, 0.7]).unwrap();
        let m = EnvironmentModel::new(rho, UnitaryOperator::identity(2)).unwrap();
        assert!((epsilon_of_env(&m).unwrap().value() - 1.0).norm() < 1e-15);

        let m = canonical_two_level(0.6, 0.0).unwrap();
        assert!((epsilon_of_env(&m).unwrap().value() - 0.6).norm() < 1e-15);

        let u = UnitaryOperator::from_phases(&[FRAC_PI_2, -FRAC_PI_2]);
        let m = EnvironmentModel::new(DensityOperator::maximally_mixed(2).unwrap(), u).unwrap();
        // (i + (−i))/2
        assert!(epsilon_of_env(&m).unwrap().modulus() < 1e-15);
    }

    #[test]
    fn mismatched_dimensions_are_rejected() {
        let rho = DensityOperator::maximally_mixed(3).unwrap();
        assert_eq!(
            EnvironmentModel::new(rho, UnitaryOperator::identity(2)),
            Err(Error::DimensionMismatch { expected: 3, actual: 2 })
        );
        assert!(canonical_two_level(1.5, 0.0).is_err());
    }

    #[test]
    fn canonical_two_level_examples() {
        let m = canonical_two_level(1.0, 0.0).unwrap();
        let want = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        assert!(max_abs_diff(m.u_env().matrix(), &want) < 1e-15);

        let m = canonical_two_level(0.0, 0.0).unwrap();
        let u0 = m.u_env().matrix().column(0).into_owned();
        assert!((u0 - CVector::from_column_slice(&[c(0.0, 0.0), c(1.0, 0.0)])).norm() < 1e-15);

        let m = canonical_two_level(0.6, 0.0).unwrap();
        let u0 = m.u_env().matrix().column(0).into_owned();
        assert!((u0 - CVector::from_column_slice(&[c(0.6, 0.0), c(0.8, 0.0)])).norm() < 1e-15);

        for (mm, d) in [(0.3, 1.0), (0.9, -2.0), (0.0, 0.5)] {
            let m = canonical_two_level(mm, d).unwrap();
            assert!(m.u_env().unitarity_deviation() < 1e-14);
            let e = epsilon_of_env(&m).unwrap();
            assert!((e.value() - Complex64::from_polar(mm, d)).norm() < 1e-14);
        }
    }

    #[test]
    fn coupling_examples() {
        let m = EnvironmentModel::new(
            DensityOperator::maximally_mixed(3).unwrap(),
            UnitaryOperator::identity(3),
        )
        .unwrap();
        let cpl = controlled_coupling(&m);
        assert!(max_abs_diff(cpl.matrix(), &CMatrix::identity(6, 6)) < 1e-15);

        let m = canonical_two_level(0.6, 0.7).unwrap();
        let cpl = controlled_coupling(&m);
        assert_eq!(cpl.dim(), 4);
        assert!(UnitaryOperator::new(cpl.matrix().clone()).is_ok());
    }

    #[test]
    fn conjugation_reproduces_blockwise_joint() {
        let psi = WaySuperposition::new(FRAC_PI_2, 0.0).unwrap();
        for m in [
            canonical_two_level(0.6, 0.0).unwrap(),
            canonical_two_level(0.35, 2.1).unwrap(),
        ] {
            let joint = entangle_joint(&psi, &m);
            assert!(max_abs_diff(joint.matrix(), &blockwise_joint(&psi, &m)) < 1e-12);
            // the dense route through the full coupling matrix
            let cpl = controlled_coupling(&m);
            let product = tensor_product(&psi.density(), m.rho_env());
            let dense = cpl.matrix() * product.matrix() * cpl.matrix().adjoint();
            assert!(max_abs_diff(joint.matrix(), &dense) < 1e-12);
        }
    }

    #[test]
    fn trivial_coupling_leaves_product_state() {
        let psi = WaySuperposition::new(1.0, 0.3).unwrap();
        let rho = DensityOperator::diagonal(&[0.25, 0.75]).unwrap();
        let m = EnvironmentModel::new(rho.clone(), UnitaryOperator::identity(2)).unwrap();
        let joint = entangle_joint(&psi, &m);
        assert!(joint.max_deviation(&tensor_product(&psi.density(), &rho)) < 1e-15);
        let reduced = reduced_system(&joint, 2).unwrap();
        assert!(reduced.max_deviation(&psi.density()) < 1e-15);
    }

    #[test]
    fn perfect_marker_gives_maximally_entangled_state() {
        let psi = WaySuperposition::new(FRAC_PI_2, 0.0).unwrap();
        let m = canonical_two_level(0.0, 0.0).unwrap();
        let joint = entangle_joint(&psi, &m);
        // (|ψ₁⟩|1⟩ + |ψ₂⟩|0⟩)/√2 since U†|0⟩ = |1⟩ for this model
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = CVector::from_column_slice(&[c(0.0, 0.0), c(s, 0.0), c(s, 0.0), c(0.0, 0.0)]);
        assert!(max_abs_diff(joint.matrix(), &(&v * v.adjoint())) < 1e-15);
        assert!((joint.purity() - 1.0).abs() < 1e-14);
        let reduced = reduced_system(&joint, 2).unwrap();
        assert!(reduced.max_deviation(&DensityOperator::maximally_mixed(2).unwrap()) < 1e-15);
    }

    #[test]
    fn reduced_state_matches_dephased_density() {
        let psi = WaySuperposition::new(FRAC_PI_2, 0.0).unwrap();
        let m = canonical_two_level(0.6, 0.0).unwrap();
        let reduced = reduced_system(&entangle_joint(&psi, &m), 2).unwrap();
        assert!((reduced.get(1, 0) - 0.3).norm() < 1e-15);

        let m = canonical_two_level(1.0, 0.0).unwrap();
        let reduced = reduced_system(&entangle_joint(&psi, &m), 2).unwrap();
        assert!(reduced.max_deviation(&psi.density()) < 1e-15);

        for (mm, d, theta, phi) in [(0.4, 1.3, 0.7, -0.2), (0.8, -PI / 3.0, 2.2, 1.0)] {
            let psi = WaySuperposition::new(theta, phi).unwrap();
            let m = canonical_two_level(mm, d).unwrap();
            let reduced = reduced_system(&entangle_joint(&psi, &m), 2).unwrap();
            let oracle = dephased_density(&psi, epsilon_of_env(&m).unwrap());
            assert!(reduced.max_deviation(&oracle) < 1e-12);
        }
        assert!(reduced_system(&DensityOperator::maximally_mixed(5).unwrap(), 2).is_err());
    }

    #[test]
    fn joint_output_is_a_valid_pure_state() {
        let psi = WaySuperposition::new(1.9, 0.4).unwrap();
        let m = canonical_two_level(0.45, -0.9).unwrap();
        let joint = entangle_joint(&psi, &m);
        joint.check().unwrap();
        assert!((joint.purity() - 1.0).abs() < 1e-12);
    }
}
