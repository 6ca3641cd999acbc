//! Two-way interferometer basics: way superpositions, density and unitary
//! operators, tensor products, partial traces, fringes and visibility.
//!
//! Way labels are fixed globally: index 0 is the first way, index 1 the
//! second. In a joint system–environment operator the system factor comes
//! first, so joint index `s * env_dim + e` addresses system way `s` and
//! environment level `e`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phase::wrap;
use crate::VALID_TOL;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Coherences smaller than this have no defined phase; the shift reads 0.
pub const SHIFT_FLOOR: f64 = 1e-14;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn max_entry(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn is_diagonal(m: &CMatrix) -> bool {
    let n = m.nrows();
    (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)] == Complex64::ZERO))
}

/// Largest entrywise modulus of `a - b`. Matrices of different shape are
/// infinitely far apart.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub fn min_hermitian_eigenvalue(m: &CMatrix) -> f64 {
    if is_diagonal(m) {
        return m.diagonal().iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    }
    let herm = (m + m.adjoint()).scale(0.5);
    SymmetricEigen::new(herm)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// A Hermitian, unit-trace, positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::validate(&matrix)?;
        Ok(Self { matrix })
    }

    /// Checks every density-operator invariant at [`VALID_TOL`].
    pub fn validate(matrix: &CMatrix) -> Result<()> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::NotDensity(format!(
                "shape {}x{} is not square and non-empty",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let herm_dev = max_abs_diff(matrix, &matrix.adjoint());
        if herm_dev > VALID_TOL {
            return Err(Error::NotDensity(format!("not Hermitian, deviation {herm_dev:e}")));
        }
        let tr = matrix.trace();
        if (tr - Complex64::ONE).norm() > VALID_TOL {
            return Err(Error::NotDensity(format!("trace is {tr}")));
        }
        let min_eig = min_hermitian_eigenvalue(matrix);
        if min_eig < -VALID_TOL {
            return Err(Error::NotDensity(format!("smallest eigenvalue is {min_eig:e}")));
        }
        Ok(())
    }

    /// Wraps a matrix that is a density operator by construction.
    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        debug_assert!(matrix.is_square());
        Self { matrix }
    }

    /// |v⟩⟨v| for a unit vector `v`.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let v = CVector::from_column_slice(amplitudes);
        let norm_sq = v.norm_squared();
        if (norm_sq - 1.0).abs() > VALID_TOL {
            return Err(Error::NotDensity(format!("state vector has squared norm {norm_sq}")));
        }
        Ok(Self::from_matrix_unchecked(&v * v.adjoint()))
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch { expected: 1, actual: 0 });
        }
        Ok(Self::from_matrix_unchecked(CMatrix::from_diagonal_element(
            dim,
            dim,
            c(1.0 / dim as f64, 0.0),
        )))
    }

    /// Diagonal operator with the given populations.
    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        let diag = CVector::from_iterator(populations.len(), populations.iter().map(|&p| c(p, 0.0)));
        Self::new(CMatrix::from_diagonal(&diag))
    }

    /// Re-checks the invariants; used to audit outputs built without checks.
    pub fn check(&self) -> Result<()> {
        Self::validate(&self.matrix)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// tr(ρ²).
    pub fn purity(&self) -> f64 {
        // tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_deviation(&self, other: &DensityOperator) -> f64 {
        max_abs_diff(&self.matrix, &other.matrix)
    }
}

/// An operator U with U†U = 1 within [`VALID_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    matrix: CMatrix,
    diagonal: bool,
}

impl UnitaryOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::NotUnitary(f64::INFINITY));
        }
        let diagonal = is_diagonal(&matrix);
        let dev = if diagonal {
            matrix
                .diagonal()
                .iter()
                .map(|z| (z.norm_sqr() - 1.0).abs())
                .fold(0.0, f64::max)
        } else {
            let n = matrix.nrows();
            max_entry(&(matrix.adjoint() * &matrix - CMatrix::identity(n, n)))
        };
        if dev > VALID_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { matrix, diagonal })
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        let diagonal = is_diagonal(&matrix);
        Self { matrix, diagonal }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim),
            diagonal: true,
        }
    }

    /// diag(e^{iφ_k}).
    pub fn from_phases(phases: &[f64]) -> Self {
        let diag = CVector::from_iterator(phases.len(), phases.iter().map(|&p| Complex64::cis(p)));
        Self {
            matrix: CMatrix::from_diagonal(&diag),
            diagonal: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    pub fn adjoint(&self) -> UnitaryOperator {
        Self {
            matrix: self.matrix.adjoint(),
            diagonal: self.diagonal,
        }
    }

    /// max |U†U − 1| entrywise.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim();
        max_entry(&(self.matrix.adjoint() * &self.matrix - CMatrix::identity(n, n)))
    }

    /// U·M.
    pub fn apply_left(&self, m: &CMatrix) -> CMatrix {
        if self.diagonal {
            let mut out = m.clone();
            for (i, mut row) in out.row_iter_mut().enumerate() {
                row *= self.matrix[(i, i)];
            }
            out
        } else {
            &self.matrix * m
        }
    }

    /// M·U†.
    pub fn apply_right_adjoint(&self, m: &CMatrix) -> CMatrix {
        if self.diagonal {
            let mut out = m.clone();
            for (j, mut col) in out.column_iter_mut().enumerate() {
                col *= self.matrix[(j, j)].conj();
            }
            out
        } else {
            m * self.matrix.adjoint()
        }
    }
}

/// cos(θ/2)|ψ₁⟩ + e^{iφ} sin(θ/2)|ψ₂⟩ with both ways populated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaySuperposition {
    theta: f64,
    phi: f64,
}

impl WaySuperposition {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < PI) {
            return Err(Error::Domain {
                name: "theta",
                value: theta,
                allowed: "the open interval (0, π)",
            });
        }
        if !phi.is_finite() {
            return Err(Error::Domain {
                name: "phi",
                value: phi,
                allowed: "the finite reals",
            });
        }
        Ok(Self { theta, phi: wrap(phi) })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        let half = self.theta / 2.0;
        [c(half.cos(), 0.0), Complex64::from_polar(half.sin(), self.phi)]
    }

    /// Populations cos²(θ/2), sin²(θ/2).
    pub fn populations(&self) -> [f64; 2] {
        let half = self.theta / 2.0;
        [half.cos().powi(2), half.sin().powi(2)]
    }

    pub fn density(&self) -> DensityOperator {
        let v = CVector::from_column_slice(&self.amplitudes());
        DensityOperator::from_matrix_unchecked(&v * v.adjoint())
    }

    /// Undisturbed fringe visibility sin θ.
    pub fn visibility(&self) -> f64 {
        self.theta.sin()
    }
}

/// The coherence factor ε = |ε| e^{iδ}, |ε| ≤ 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Epsilon {
    modulus: f64,
    delta: f64,
}

impl Epsilon {
    pub const ONE: Epsilon = Epsilon {
        modulus: 1.0,
        delta: 0.0,
    };
    pub const ZERO: Epsilon = Epsilon {
        modulus: 0.0,
        delta: 0.0,
    };

    /// Slack granted to moduli that come out of quadrature or eigensolvers.
    const MODULUS_SLACK: f64 = 1e-9;

    pub fn new(modulus: f64, delta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&modulus) {
            return Err(Error::Domain {
                name: "eps_modulus",
                value: modulus,
                allowed: "[0, 1]",
            });
        }
        if !delta.is_finite() {
            return Err(Error::Domain {
                name: "delta",
                value: delta,
                allowed: "the finite reals",
            });
        }
        let delta = if modulus == 0.0 { 0.0 } else { wrap(delta) };
        Ok(Self { modulus, delta })
    }

    /// Accepts |z| up to 1 + 1e-9 and clamps it to 1.
    pub fn from_complex(z: Complex64) -> Result<Self> {
        let modulus = z.norm();
        if !modulus.is_finite() || modulus > 1.0 + Self::MODULUS_SLACK {
            return Err(Error::Domain {
                name: "|eps|",
                value: modulus,
                allowed: "[0, 1]",
            });
        }
        let delta = if modulus < SHIFT_FLOOR { 0.0 } else { z.arg() };
        Self::new(modulus.min(1.0), delta)
    }

    pub fn modulus(&self) -> f64 {
        self.modulus
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn value(&self) -> Complex64 {
        Complex64::from_polar(self.modulus, self.delta)
    }
}

/// Visibility 2|ρ₂₁| and fringe shift arg ρ₂₁.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Visibility {
    pub visibility: f64,
    pub shift: f64,
}

/// Sampled fringe: (probe phase, detection probability) pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct FringePattern {
    pub points: Vec<(f64, f64)>,
}

impl FringePattern {
    /// Samples `fringe_probability` on [`probe_grid`]`(n)`.
    pub fn sample(rho: &DensityOperator, n: usize) -> Result<Self> {
        let points = probe_grid(n)
            .into_iter()
            .map(|phi| fringe_probability(rho, phi).map(|p| (phi, p)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { points })
    }

    pub fn mean(&self) -> f64 {
        self.points.iter().map(|&(_, p)| p).sum::<f64>() / self.points.len() as f64
    }

    pub fn max(&self) -> f64 {
        self.points.iter().map(|&(_, p)| p).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.points.iter().map(|&(_, p)| p).fold(f64::INFINITY, f64::min)
    }
}

/// Uniform probe phases 2πj/n, wrapped, j = 0..n.
pub fn probe_grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| wrap(2.0 * PI * j as f64 / n as f64)).collect()
}

/// Projector onto the state prepared by `WaySuperposition::new(theta, phi)`.
pub fn superposition_state(theta: f64, phi: f64) -> Result<DensityOperator> {
    Ok(WaySuperposition::new(theta, phi)?.density())
}

/// Projector onto (|ψ₁⟩ + e^{iφ}|ψ₂⟩)/√2.
pub fn probe_projector(phi_probe: f64) -> DensityOperator {
    let v = CVector::from_column_slice(&[
        c(FRAC_1_SQRT_2, 0.0),
        Complex64::from_polar(FRAC_1_SQRT_2, wrap(phi_probe)),
    ]);
    DensityOperator::from_matrix_unchecked(&v * v.adjoint())
}

fn require_qubit(rho: &DensityOperator) -> Result<()> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: rho.dim(),
        });
    }
    Ok(())
}

/// ⟨ψ(φ)|ρ|ψ(φ)⟩ = ½[1 + 2 Re(e^{−iφ} ρ₂₁)].
pub fn fringe_probability(rho: &DensityOperator, phi_probe: f64) -> Result<f64> {
    require_qubit(rho)?;
    let pops = rho.get(0, 0).re + rho.get(1, 1).re;
    let p = 0.5 * (pops + 2.0 * (Complex64::cis(-phi_probe) * rho.get(1, 0)).re);
    Ok(p.clamp(0.0, 1.0))
}

pub fn visibility(rho: &DensityOperator) -> Result<Visibility> {
    require_qubit(rho)?;
    let coherence = rho.get(1, 0);
    let modulus = coherence.norm();
    let shift = if modulus < SHIFT_FLOOR {
        0.0
    } else {
        wrap(coherence.arg())
    };
    Ok(Visibility {
        visibility: (2.0 * modulus).min(1.0),
        shift,
    })
}

/// The state after a coherence-attenuating channel: populations kept,
/// ρ₂₁ multiplied by ε.
pub fn dephased_density(psi0: &WaySuperposition, eps: Epsilon) -> DensityOperator {
    let [p1, p2] = psi0.populations();
    let half = psi0.theta() / 2.0;
    let coherence = Complex64::from_polar(half.sin() * half.cos(), psi0.phi()) * eps.value();
    DensityOperator::from_matrix_unchecked(CMatrix::from_row_slice(
        2,
        2,
        &[c(p1, 0.0), coherence.conj(), coherence, c(p2, 0.0)],
    ))
}

/// a ⊗ b with the first factor as the slow index.
pub fn tensor_product(a: &DensityOperator, b: &DensityOperator) -> DensityOperator {
    DensityOperator::from_matrix_unchecked(a.matrix().kronecker(b.matrix()))
}

/// Traces out the environment factor of a system-first joint operator.
pub fn partial_trace_env(joint: &DensityOperator, sys_dim: usize, env_dim: usize) -> Result<DensityOperator> {
    let expected = sys_dim * env_dim;
    if sys_dim == 0 || env_dim == 0 || joint.dim() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            actual: joint.dim(),
        });
    }
    let m = joint.matrix();
    let reduced = CMatrix::from_fn(sys_dim, sys_dim, |s, t| {
        (0..env_dim).map(|e| m[(s * env_dim + e, t * env_dim + e)]).sum()
    });
    Ok(DensityOperator::from_matrix_unchecked(reduced))
}
