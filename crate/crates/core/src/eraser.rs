//! Quantum erasure: measure the environment in a chosen basis and sort the
//! runs into conditional subensembles.
//!
//! Sorting needs a joint system–environment state, so everything here takes
//! an [`EnvironmentModel`] or a joint operator. The phase-kick picture has
//! no record to condition on; [`classical_sort_control`] is the Monte Carlo
//! control showing that random tags independent of the kick recover nothing.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::dephase::{epsilon_of_weight, KickSampler, PhaseWeight};
use crate::entangle::{entangle_joint, reduced_system, EnvironmentModel};
use crate::error::{Error, Result};
use crate::estimate::{fourier_visibility, FringeCounts};
use crate::qcore::{max_abs_diff, probe_grid, visibility, CMatrix, CVector, DensityOperator, WaySuperposition};
use crate::report::Report;
use crate::rng::stream;
use crate::spectral::eigenspaces;
use crate::VALID_TOL;

/// Outcomes less likely than this are dropped before normalizing.
pub const OUTCOME_FLOOR: f64 = 1e-14;

/// Probe phases per tag in [`classical_sort_control`].
pub const CONTROL_PROBE_GRID: usize = 64;

/// An orthonormal basis of the environment space.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvBasis {
    vectors: Vec<CVector>,
}

impl EnvBasis {
    pub fn new(vectors: Vec<CVector>) -> Result<Self> {
        let dim = vectors.len();
        if dim == 0 {
            return Err(Error::DimensionMismatch { expected: 1, actual: 0 });
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: v.len(),
            });
        }
        let mut worst: f64 = 0.0;
        for (j, a) in vectors.iter().enumerate() {
            for (k, b) in vectors.iter().enumerate() {
                let overlap = a.dotc(b);
                let target = if j == k { Complex64::ONE } else { Complex64::ZERO };
                worst = worst.max((overlap - target).norm());
            }
        }
        if worst > VALID_TOL {
            return Err(Error::NotOrthonormal(worst));
        }
        Ok(Self { vectors })
    }

    pub fn computational(dim: usize) -> Self {
        let vectors = (0..dim)
            .map(|k| {
                let mut e = CVector::zeros(dim);
                e[k] = Complex64::ONE;
                e
            })
            .collect();
        Self { vectors }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }
}

/// Eigenbasis of U_env. Eigenspaces are ordered by their mass under ρ_env,
/// heaviest first, ties broken by ascending eigenphase; each vector has its
/// first non-negligible component real and positive.
pub fn eigen_erasure_basis(m: &EnvironmentModel) -> Result<EnvBasis> {
    let mut spaces: Vec<(f64, f64, Vec<CVector>)> = eigenspaces(m.u_env())?
        .into_iter()
        .map(|s| (s.weight(m.rho_env()), s.phase, s.vectors))
        .collect();
    spaces.sort_by(|a, b| {
        if (a.0 - b.0).abs() > 1e-12 {
            b.0.total_cmp(&a.0)
        } else {
            a.1.total_cmp(&b.1)
        }
    });
    EnvBasis::new(spaces.into_iter().flat_map(|(_, _, vs)| vs).collect())
}

/// One measurement outcome and the system state conditioned on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Subensemble {
    pub label: usize,
    pub probability: f64,
    pub state: DensityOperator,
}

/// Conditions `joint` on each basis outcome. Outcomes with probability
/// below [`OUTCOME_FLOOR`] are left out.
pub fn sort_subensembles(joint: &DensityOperator, basis: &EnvBasis) -> Result<Vec<Subensemble>> {
    let d = basis.dim();
    if joint.dim() != 2 * d {
        return Err(Error::DimensionMismatch {
            expected: 2 * d,
            actual: joint.dim(),
        });
    }
    let m = joint.matrix();
    let mut out = Vec::new();
    for (label, b) in basis.vectors().iter().enumerate() {
        // ⟨b|X_st|b⟩ for each system block (s, t)
        let block = |s: usize, t: usize| -> Complex64 {
            let x = m.view((s * d, t * d), (d, d));
            (b.adjoint() * x * b)[(0, 0)]
        };
        let unnormalized = DMatrix::from_fn(2, 2, block);
        let probability = unnormalized[(0, 0)].re + unnormalized[(1, 1)].re;
        if probability < OUTCOME_FLOOR {
            continue;
        }
        out.push(Subensemble {
            label,
            probability,
            state: DensityOperator::from_matrix_unchecked(unnormalized.unscale(probability)),
        });
    }
    Ok(out)
}

/// max |Σ_k p_k ρ_k − ρ| entrywise.
pub fn mixture_deviation(subensembles: &[Subensemble], reduced: &DensityOperator) -> f64 {
    let mut sum = CMatrix::zeros(2, 2);
    for s in subensembles {
        sum += s.state.matrix().scale(s.probability);
    }
    max_abs_diff(&sum, reduced.matrix())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErasureRow {
    pub label: usize,
    pub probability: f64,
    pub visibility: f64,
    pub shift: f64,
    pub purity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErasureReport {
    pub rows: Vec<ErasureRow>,
    pub unconditioned_visibility: f64,
    pub unconditioned_shift: f64,
    pub mixture_deviation: f64,
}

impl ErasureReport {
    pub fn max_visibility(&self) -> f64 {
        self.rows.iter().map(|r| r.visibility).fold(0.0, f64::max)
    }

    pub fn report(&self) -> Report {
        let mut r = Report::new();
        r.real("unconditioned_visibility", self.unconditioned_visibility)
            .real("unconditioned_shift", self.unconditioned_shift)
            .real("mixture_deviation", self.mixture_deviation);
        for row in &self.rows {
            r.row("subensemble")
                .int("label", row.label as u64)
                .real("probability", row.probability)
                .real("visibility", row.visibility)
                .real("shift", row.shift)
                .real("purity", row.purity);
        }
        r
    }
}

/// Couples ψ₀ to `m`, sorts by `basis` and tabulates each subensemble.
pub fn erasure_report(psi0: &WaySuperposition, m: &EnvironmentModel, basis: &EnvBasis) -> Result<ErasureReport> {
    let joint = entangle_joint(psi0, m);
    let reduced = reduced_system(&joint, m.dim())?;
    let subs = sort_subensembles(&joint, basis)?;
    let unconditioned = visibility(&reduced)?;
    let rows = subs
        .iter()
        .map(|s| {
            let v = visibility(&s.state)?;
            Ok(ErasureRow {
                label: s.label,
                probability: s.probability,
                visibility: v.visibility,
                shift: v.shift,
                purity: s.state.purity(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ErasureReport {
        rows,
        unconditioned_visibility: unconditioned.visibility,
        unconditioned_shift: unconditioned.shift,
        mixture_deviation: mixture_deviation(&subs, &reduced),
    })
}

/// θ = 2 atan|ε|, where sorting the canonical detector in its computational
/// basis leaves one subensemble with unit visibility.
pub fn full_visibility_theta(eps_modulus: f64) -> Result<f64> {
    if !(eps_modulus > 0.0 && eps_modulus <= 1.0) {
        return Err(Error::Domain {
            name: "eps_modulus",
            value: eps_modulus,
            allowed: "(0, 1]; at 0 no subensemble keeps any coherence",
        });
    }
    Ok(2.0 * eps_modulus.atan())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TagRow {
    pub tag: usize,
    pub shots: u64,
    pub visibility: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalControlReport {
    pub tags: Vec<TagRow>,
    /// |ε| sin θ.
    pub expected_visibility: f64,
    /// Largest V̂ − |ε| sin θ − 4/√(shots per tag) over tags; ≤ 0 when no
    /// tag beats the bound.
    pub max_excess: f64,
    pub pass: bool,
}

impl ClassicalControlReport {
    pub fn report(&self) -> Report {
        let mut r = Report::new();
        r.real("unconditioned_visibility", self.expected_visibility)
            .real("max_excess", self.max_excess)
            .flag("pass", self.pass);
        for t in &self.tags {
            r.row("tag")
                .int("label", t.tag as u64)
                .int("shots", t.shots)
                .real("visibility", t.visibility)
                .real("bound", 4.0 / (t.shots.max(1) as f64).sqrt());
        }
        r
    }
}

/// Sorting under classical kicks: every shot draws a kick and an
/// independent uniform tag, the kick is then forgotten. Shot `i` uses probe
/// phase `i mod 64`. `pass` means every tag's V̂ lies within
/// 4/√(shots per tag) of |ε| sin θ.
pub fn classical_sort_control(
    psi0: &WaySuperposition,
    w: &PhaseWeight,
    n_tags: usize,
    shots: u64,
    seed: u64,
) -> Result<ClassicalControlReport> {
    if n_tags == 0 {
        return Err(Error::Domain {
            name: "n_tags",
            value: 0.0,
            allowed: "the positive integers",
        });
    }
    let expected_visibility = epsilon_of_weight(w)?.modulus() * psi0.visibility();
    let sampler = KickSampler::new(w)?;
    let phases = probe_grid(CONTROL_PROBE_GRID);
    let mut counts = vec![FringeCounts::new(CONTROL_PROBE_GRID); n_tags];
    let mut rng = stream(seed, 0);
    let sin_theta = psi0.visibility();
    for i in 0..shots {
        let probe = (i % CONTROL_PROBE_GRID as u64) as usize;
        let kick = sampler.sample(&mut rng);
        let tag = rng.random_range(0..n_tags);
        let p = 0.5 * (1.0 + sin_theta * (phases[probe] - psi0.phi() - kick).cos());
        let hit = rng.random::<f64>() < p;
        counts[tag].record(probe, hit);
    }
    let tags: Vec<TagRow> = counts
        .iter()
        .enumerate()
        .map(|(tag, c)| TagRow {
            tag,
            shots: c.total_shots(),
            visibility: fourier_visibility(&phases, c).visibility,
        })
        .collect();
    let bound = |t: &TagRow| 4.0 / (t.shots.max(1) as f64).sqrt();
    let max_excess = tags
        .iter()
        .map(|t| t.visibility - expected_visibility - bound(t))
        .fold(f64::NEG_INFINITY, f64::max);
    let pass = tags
        .iter()
        .all(|t| (t.visibility - expected_visibility).abs() <= bound(t));
    Ok(ClassicalControlReport {
        tags,
        expected_visibility,
        max_excess,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dephase::delta_pair_weight;
    use crate::entangle::canonical_two_level;
    use crate::phase::circular_distance;
    use crate::qcore::{tensor_product, Epsilon, UnitaryOperator};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn canonical_eigenbasis_is_plus_minus() {
        let basis = eigen_erasure_basis(&canonical_two_level(0.6, 0.0).unwrap()).unwrap();
        let (a, b) = (0.8f64.sqrt(), 0.2f64.sqrt());
        assert!((&basis.vectors()[0] - CVector::from_column_slice(&[c(a, 0.0), c(b, 0.0)])).norm() < 1e-12);
        assert!((&basis.vectors()[1] - CVector::from_column_slice(&[c(b, 0.0), c(-a, 0.0)])).norm() < 1e-12);
    }

    #[test]
    fn degenerate_or_diagonal_unitaries_give_computational_basis() {
        let rho = DensityOperator::diagonal(&[1.0, 0.0]).unwrap();
        for u in [
            UnitaryOperator::identity(2),
            UnitaryOperator::from_phases(&[FRAC_PI_2, -FRAC_PI_2]),
        ] {
            let m = EnvironmentModel::new(rho.clone(), u).unwrap();
            assert_eq!(eigen_erasure_basis(&m).unwrap(), EnvBasis::computational(2));
        }
    }

    #[test]
    fn basis_validation() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(EnvBasis::new(vec![
            CVector::from_column_slice(&[c(s, 0.0), c(s, 0.0)]),
            CVector::from_column_slice(&[c(s, 0.0), c(-s, 0.0)]),
        ])
        .is_ok());
        assert!(matches!(
            EnvBasis::new(vec![
                CVector::from_column_slice(&[c(1.0, 0.0), c(0.0, 0.0)]),
                CVector::from_column_slice(&[c(s, 0.0), c(s, 0.0)]),
            ]),
            Err(Error::NotOrthonormal(_))
        ));
    }

    #[test]
    fn eigenbasis_sort_restores_original_visibility() {
        let psi = WaySuperposition::new(FRAC_PI_2, 0.3).unwrap();
        let m = canonical_two_level(0.6, 0.5).unwrap();
        let joint = entangle_joint(&psi, &m);
        let subs = sort_subensembles(&joint, &eigen_erasure_basis(&m).unwrap()).unwrap();
        assert_eq!(subs.len(), 2);
        assert!((subs[0].probability - 0.8).abs() < 1e-12);
        assert!((subs[1].probability - 0.2).abs() < 1e-12);
        let shifts = [psi.phi() + 0.5, psi.phi() + 0.5 + PI];
        for (s, want) in subs.iter().zip(shifts) {
            assert!((s.state.purity() - 1.0).abs() < 1e-12);
            let v = visibility(&s.state).unwrap();
            assert!((v.visibility - 1.0).abs() < 1e-12);
            assert!(circular_distance(v.shift, want) < 1e-12);
        }
    }

    #[test]
    fn product_state_sort_returns_system_factor() {
        let sys = crate::qcore::superposition_state(1.0, 0.2).unwrap();
        let env = DensityOperator::diagonal(&[0.3, 0.7]).unwrap();
        let joint = tensor_product(&sys, &env);
        let subs = sort_subensembles(&joint, &EnvBasis::computational(2)).unwrap();
        assert_eq!(subs.len(), 2);
        for s in &subs {
            assert!(s.state.max_deviation(&sys) < 1e-15);
        }
        assert!(sort_subensembles(&joint, &EnvBasis::computational(3)).is_err());
    }

    #[test]
    fn computational_sort_at_full_visibility_angle() {
        // conditional amplitudes on |0⟩: (ε* cos(θ/2), sin(θ/2)), on |1⟩: way 1 only
        let theta = full_visibility_theta(0.6).unwrap();
        assert!(((theta / 2.0).tan() - 0.6).abs() < 1e-15);
        let psi = WaySuperposition::new(theta, 0.0).unwrap();
        let m = canonical_two_level(0.6, 0.0).unwrap();
        let subs = sort_subensembles(&entangle_joint(&psi, &m), &EnvBasis::computational(2)).unwrap();
        let v0 = visibility(&subs[0].state).unwrap().visibility;
        let v1 = visibility(&subs[1].state).unwrap().visibility;
        assert!((v0 - 1.0).abs() < 1e-12);
        assert!(v1 < 1e-12);
    }

    #[test]
    fn erasure_report_examples() {
        let psi = WaySuperposition::new(1.1, 0.0).unwrap();
        let m = canonical_two_level(0.3, 0.0).unwrap();
        let r = erasure_report(&psi, &m, &eigen_erasure_basis(&m).unwrap()).unwrap();
        for row in &r.rows {
            assert!((row.visibility - 1.1f64.sin()).abs() < 1e-12);
        }
        assert!((r.unconditioned_visibility - 0.3 * 1.1f64.sin()).abs() < 1e-12);
        assert!(r.mixture_deviation < 1e-14);

        let m = canonical_two_level(1.0, 0.0).unwrap();
        let r = erasure_report(&psi, &m, &EnvBasis::computational(2)).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert!((r.rows[0].visibility - 1.1f64.sin()).abs() < 1e-12);
    }

    #[test]
    fn visibility_excess_matches_grid_scan() {
        // brute-force maximization of the best subensemble visibility over θ
        let m = canonical_two_level(0.5, 0.0).unwrap();
        let basis = EnvBasis::computational(2);
        let n = 10_000;
        let (mut best_theta, mut best_v) = (0.0, -1.0);
        for k in 1..n {
            let theta = PI * k as f64 / n as f64;
            let psi = WaySuperposition::new(theta, 0.0).unwrap();
            let v = erasure_report(&psi, &m, &basis).unwrap().max_visibility();
            if v > best_v {
                best_v = v;
                best_theta = theta;
            }
        }
        let theta = full_visibility_theta(0.5).unwrap();
        assert!((theta - 0.927295).abs() < 1e-6);
        assert!((best_theta - theta).abs() < PI / n as f64);
        let psi = WaySuperposition::new(theta, 0.0).unwrap();
        let r = erasure_report(&psi, &m, &basis).unwrap();
        assert!((r.max_visibility() - 1.0).abs() < 1e-12);
        assert!(r.max_visibility() > theta.sin());
        assert!((theta.sin() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn full_visibility_theta_examples() {
        assert!((full_visibility_theta(1.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!(full_visibility_theta(0.0).is_err());
        let theta = full_visibility_theta(0.2).unwrap();
        let psi = WaySuperposition::new(theta, 0.0).unwrap();
        let m = canonical_two_level(0.2, 0.0).unwrap();
        let r = erasure_report(&psi, &m, &EnvBasis::computational(2)).unwrap();
        assert!((r.max_visibility() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn classical_control_examples() {
        let psi = WaySuperposition::new(FRAC_PI_2, 0.0).unwrap();
        let r = classical_sort_control(&psi, &PhaseWeight::atoms([(0.0, 1.0)]).unwrap(), 3, 30_000, 1).unwrap();
        for t in &r.tags {
            assert!((t.visibility - 1.0).abs() < 4.0 / (t.shots as f64).sqrt());
        }
        let r = classical_sort_control(&psi, &PhaseWeight::window(0.0, PI).unwrap(), 2, 100_000, 2).unwrap();
        assert!(r.tags.iter().all(|t| t.visibility < 0.02), "{r:?}");
        let w = delta_pair_weight(Epsilon::new(0.5, 0.0).unwrap());
        let r = classical_sort_control(&psi, &w, 2, 100_000, 3).unwrap();
        assert!(r.tags.iter().all(|t| (t.visibility - 0.5).abs() < 0.02), "{r:?}");
        assert!(r.pass);
    }
}
