//! Truncated Fock-space numerics for the two-cavity which-way detector.
//!
//! Coherent states |α⟩, their ladder action, the weighted resolution of the
//! identity
//!
//! ```text
//! 1 = ∫dφ/2π ∫dI W|α⟩⟨α|W,   W = [(a†a)! I^(−a†a)]^(1/2),   α = √I e^{iφ}
//! ```
//!
//! the phase-integral form of ⟨1₁0₂|0₁1₂⟩ = 0 that it produces, and the
//! detector overlap ⟨A₁|A₂⟩ = cos²(λt).
//!
//! W is applied to coherent-state components in log space,
//! ⟨n|W|α⟩ = exp(ln|⟨n|α⟩| + ½ ln n! − (n/2) ln I) e^{inφ}, so the I^(−n)
//! factor never forms on its own.

use num_complex::Complex64;

use crate::dephase::{epsilon_of_weight, sew_weight};
use crate::error::{Error, Result};
use crate::qcore::Epsilon;
use crate::quadrature::{gauss_legendre, periodic_trapezoid};
use crate::report::Report;

/// Factorials up to this order are taken as exact products.
const EXACT_FACTORIAL_MAX: usize = 20;

/// Smallest grid in either quadrature direction.
pub const MIN_QUAD_GRID: usize = 8;

/// ln n!.
pub fn ln_factorial(n: usize) -> f64 {
    if n <= EXACT_FACTORIAL_MAX {
        (1..=n).map(|k| k as f64).product::<f64>().ln()
    } else {
        (1..=n).map(|k| (k as f64).ln()).sum()
    }
}

/// Poisson tail Σ_{n > n_max} e^{−x} x^n / n!, summed upward in log space.
pub fn poisson_tail(mean: f64, n_max: usize) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    let ln_mean = mean.ln();
    let mut total = 0.0;
    let mut n = n_max + 1;
    loop {
        let term = (-mean + n as f64 * ln_mean - ln_factorial(n)).exp();
        total += term;
        if (n as f64 > mean && term <= total * 1e-18) || term == 0.0 && n as f64 > mean {
            break;
        }
        n += 1;
    }
    total
}

/// A single-mode state truncated at photon number `n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amplitudes: Vec<Complex64>,
}

impl FockVector {
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: amplitudes.len(),
            });
        }
        let v = Self { amplitudes };
        let norm_sq = v.norm_sq();
        if norm_sq > 1.0 + 1e-12 {
            return Err(Error::Domain {
                name: "|v|²",
                value: norm_sq,
                allowed: "[0, 1]",
            });
        }
        Ok(v)
    }

    /// |n⟩ in a space truncated at `n_max`.
    pub fn number(n: usize, n_max: usize) -> Result<Self> {
        if n > n_max {
            return Err(Error::DimensionMismatch {
                expected: n_max,
                actual: n,
            });
        }
        let mut amplitudes = vec![Complex64::ZERO; n_max + 1];
        amplitudes[n] = Complex64::ONE;
        Self::from_amplitudes(amplitudes)
    }

    pub fn n_max(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Norm lost to truncation, 1 − ‖v‖².
    pub fn truncation_deficit(&self) -> f64 {
        1.0 - self.norm_sq()
    }

    pub fn inner(&self, other: &FockVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// a|v⟩ (unnormalized, as a plain amplitude list).
    pub fn lowered(&self) -> Vec<Complex64> {
        let n_max = self.n_max();
        (0..=n_max)
            .map(|n| {
                if n < n_max {
                    self.amplitudes[n + 1] * ((n + 1) as f64).sqrt()
                } else {
                    Complex64::ZERO
                }
            })
            .collect()
    }
}

/// e^{−|α|²/2} Σ_{n ≤ n_max} α^n/√(n!) |n⟩.
pub fn coherent_state(alpha: Complex64, n_max: usize) -> Result<FockVector> {
    if n_max < 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            actual: n_max,
        });
    }
    let mean = alpha.norm_sqr();
    let amplitudes = (0..=n_max)
        .map(|n| {
            if n == 0 {
                return Complex64::new((-mean / 2.0).exp(), 0.0);
            }
            if mean == 0.0 {
                return Complex64::ZERO;
            }
            let ln_mod = -mean / 2.0 + n as f64 * alpha.norm().ln() - 0.5 * ln_factorial(n);
            Complex64::from_polar(ln_mod.exp(), n as f64 * alpha.arg())
        })
        .collect();
    FockVector::from_amplitudes(amplitudes)
}

/// ⟨n|W|α⟩ at α = √I e^{iφ}; analytically e^{−I/2} e^{inφ}.
pub fn weighted_coherent_component(n: usize, intensity: f64, varphi: f64) -> Complex64 {
    let ln_i = intensity.ln();
    let ln_coherent = -intensity / 2.0 + 0.5 * n as f64 * ln_i - 0.5 * ln_factorial(n);
    let ln_weight = 0.5 * ln_factorial(n) - 0.5 * n as f64 * ln_i;
    Complex64::from_polar((ln_coherent + ln_weight).exp(), n as f64 * varphi)
}

/// Grid for the coherent-state resolution of the identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolutionParams {
    /// Largest photon number in the checked block.
    pub n_sub: usize,
    pub n_max: usize,
    /// Upper intensity limit.
    pub i_max: f64,
    /// Periodic trapezoid nodes in φ.
    pub n_phi: usize,
    /// Gauss–Legendre nodes in I on [0, i_max].
    pub n_i: usize,
}

impl Default for ResolutionParams {
    fn default() -> Self {
        Self {
            n_sub: 12,
            n_max: 32,
            i_max: 50.0,
            n_phi: 64,
            n_i: 200,
        }
    }
}

impl ResolutionParams {
    fn validate(&self) -> Result<()> {
        if self.n_phi < MIN_QUAD_GRID || self.n_i < MIN_QUAD_GRID {
            return Err(Error::GridTooSmall(format!(
                "n_phi = {} and n_i = {} must both be at least {MIN_QUAD_GRID}",
                self.n_phi, self.n_i
            )));
        }
        if 2 * self.n_sub > self.n_max {
            return Err(Error::GridTooSmall(format!(
                "n_sub = {} exceeds n_max/2 = {}",
                self.n_sub,
                self.n_max / 2
            )));
        }
        if !(self.i_max > 0.0 && self.i_max.is_finite()) {
            return Err(Error::Domain {
                name: "i_max",
                value: self.i_max,
                allowed: "the positive reals",
            });
        }
        Ok(())
    }
}

/// M_mn = ∫dφ/2π ∫₀^{i_max} dI ⟨m|W|α⟩⟨α|W|n⟩ for m, n ≤ n_sub.
pub fn resolution_matrix(p: &ResolutionParams) -> Result<Vec<Vec<Complex64>>> {
    p.validate()?;
    let phi_rule = periodic_trapezoid(p.n_phi);
    let i_rule = gauss_legendre(p.n_i, 0.0, p.i_max);
    let size = p.n_sub + 1;
    let mut m = vec![vec![Complex64::ZERO; size]; size];
    let mut column = vec![Complex64::ZERO; size];
    for (&phi, &wphi) in phi_rule.nodes.iter().zip(&phi_rule.weights) {
        for (&intensity, &wi) in i_rule.nodes.iter().zip(&i_rule.weights) {
            let w = wphi / (2.0 * std::f64::consts::PI) * wi;
            for (n, c) in column.iter_mut().enumerate() {
                *c = weighted_coherent_component(n, intensity, phi);
            }
            for (row, &cm) in m.iter_mut().zip(&column) {
                for (entry, &cn) in row.iter_mut().zip(&column) {
                    *entry += cm * cn.conj() * w;
                }
            }
        }
    }
    Ok(m)
}

/// max |M_mn − δ_mn| of [`resolution_matrix`].
pub fn resolution_check(p: &ResolutionParams) -> Result<f64> {
    let m = resolution_matrix(p)?;
    let mut worst: f64 = 0.0;
    for (i, row) in m.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((z - target).norm());
        }
    }
    Ok(worst)
}

/// ⟨1₁0₂|1₁1₂|0₁1₂⟩ through two coherent-state resolutions, with the
/// relative-phase weight it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseIntegral {
    pub value: Complex64,
    /// (relative phase φ₁ − φ₂, weight density) on the φ grid.
    pub relative_phase_density: Vec<(f64, Complex64)>,
}

pub fn phase_integral_inner_product(p: &ResolutionParams) -> Result<PhaseIntegral> {
    ResolutionParams { n_sub: 0, ..*p }.validate()?;
    if p.n_max < 1 {
        return Err(Error::GridTooSmall("n_max must be at least 1".into()));
    }
    let phi_rule = periodic_trapezoid(p.n_phi);
    let i_rule = gauss_legendre(p.n_i, 0.0, p.i_max);
    let tau = 2.0 * std::f64::consts::PI;
    // per-mode intensity integrals at each φ node:
    // mode 1 carries ⟨1|W|α₁⟩⟨α₁|W|0⟩, mode 2 carries ⟨0|W|α₂⟩⟨α₂|W|1⟩
    let mode = |bra: usize, ket: usize| -> Vec<Complex64> {
        phi_rule
            .nodes
            .iter()
            .map(|&phi| {
                i_rule
                    .nodes
                    .iter()
                    .zip(&i_rule.weights)
                    .map(|(&i, &w)| {
                        weighted_coherent_component(bra, i, phi) * weighted_coherent_component(ket, i, phi).conj() * w
                    })
                    .sum()
            })
            .collect()
    };
    let first = mode(1, 0);
    let second = mode(0, 1);
    let n = p.n_phi;
    let h = phi_rule.weights[0] / tau;
    let mut value = Complex64::ZERO;
    let mut by_relative = vec![Complex64::ZERO; n];
    for (j1, a) in first.iter().enumerate() {
        for (j2, b) in second.iter().enumerate() {
            let term = a * b * h * h;
            value += term;
            by_relative[(j1 + n - j2) % n] += term;
        }
    }
    // term = Ω_k e^{iφ_k} per relative-phase node, Ω as a density in φ
    let relative_phase_density = by_relative
        .iter()
        .enumerate()
        .map(|(k, z)| {
            let rel = crate::phase::wrap(tau * k as f64 / n as f64);
            (rel, z * Complex64::cis(-rel) / (tau / n as f64))
        })
        .collect();
    Ok(PhaseIntegral {
        value,
        relative_phase_density,
    })
}

/// A two-mode state with photon numbers up to `n_max` in each mode.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeFock {
    n_max: usize,
    amplitudes: Vec<Complex64>,
}

impl TwoModeFock {
    pub fn zero(n_max: usize) -> Self {
        Self {
            n_max,
            amplitudes: vec![Complex64::ZERO; (n_max + 1) * (n_max + 1)],
        }
    }

    /// |n₁ n₂⟩.
    pub fn basis(n1: usize, n2: usize, n_max: usize) -> Self {
        let mut s = Self::zero(n_max);
        s.amplitudes[n1 * (n_max + 1) + n2] = Complex64::ONE;
        s
    }

    pub fn scaled(mut self, c: f64) -> Self {
        for z in &mut self.amplitudes {
            *z *= c;
        }
        self
    }

    pub fn plus(mut self, other: &TwoModeFock) -> Self {
        for (a, b) in self.amplitudes.iter_mut().zip(&other.amplitudes) {
            *a += b;
        }
        self
    }

    pub fn inner(&self, other: &TwoModeFock) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }
}

/// Coupling strength of the detector cavities; only the product λt enters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SewParams {
    pub lambda_t: f64,
}

/// |A₁⟩ = cos(λt)|0₁0₂⟩ + sin(λt)|1₁0₂⟩ and |A₂⟩ = cos(λt)|0₁0₂⟩ + sin(λt)|0₁1₂⟩.
pub fn sew_detector_states(p: SewParams) -> (TwoModeFock, TwoModeFock) {
    let (s, c) = p.lambda_t.sin_cos();
    let vac = TwoModeFock::basis(0, 0, 1);
    let a1 = vac.clone().scaled(c).plus(&TwoModeFock::basis(1, 0, 1).scaled(s));
    let a2 = vac.scaled(c).plus(&TwoModeFock::basis(0, 1, 1).scaled(s));
    (a1, a2)
}

/// ⟨A₁|A₂⟩ from the explicit two-mode vectors.
pub fn sew_overlap(p: SewParams) -> f64 {
    let (a1, a2) = sew_detector_states(p);
    a1.inner(&a2).re
}

/// ε = ⟨A₁|A₂⟩ = cos²(λt), cross-checked against the cosine phase weight.
pub fn sew_epsilon_bridge(p: SewParams) -> Result<Epsilon> {
    let eps = Epsilon::new(sew_overlap(p).clamp(0.0, 1.0), 0.0)?;
    let via_weight = epsilon_of_weight(&sew_weight(p.lambda_t)?)?;
    let gap = (via_weight.value() - eps.value()).norm();
    if gap > 1e-10 {
        return Err(Error::CheckFailed(format!(
            "detector overlap {} and weight moment {} differ by {gap:e}",
            eps.modulus(),
            via_weight.modulus()
        )));
    }
    Ok(eps)
}

/// Deviation summary printed by the `fock-verify` command.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVerification {
    pub params: ResolutionParams,
    pub resolution_max_deviation: f64,
    pub phase_integral: Complex64,
    pub relative_density_max_deviation: f64,
    pub sew_overlap_max_error: f64,
    pub pass: bool,
}

/// Thresholds for [`verify`].
pub const RESOLUTION_TOL: f64 = 1e-6;
pub const PHASE_INTEGRAL_TOL: f64 = 1e-10;
pub const SEW_OVERLAP_TOL: f64 = 1e-12;

/// Runs the resolution check, the phase integral and an overlap sweep over
/// 100 λt values in [0, 2π).
pub fn verify(p: &ResolutionParams) -> Result<FockVerification> {
    let resolution_max_deviation = resolution_check(p)?;
    let integral = phase_integral_inner_product(p)?;
    let flat = 1.0 / (2.0 * std::f64::consts::PI);
    let relative_density_max_deviation = integral
        .relative_phase_density
        .iter()
        .map(|(_, d)| (d - flat).norm())
        .fold(0.0, f64::max);
    let sew_overlap_max_error = (0..100)
        .map(|k| {
            let lambda_t = 2.0 * std::f64::consts::PI * k as f64 / 100.0;
            (sew_overlap(SewParams { lambda_t }) - lambda_t.cos().powi(2)).abs()
        })
        .fold(0.0, f64::max);
    let pass = resolution_max_deviation < RESOLUTION_TOL
        && integral.value.norm() < PHASE_INTEGRAL_TOL
        && sew_overlap_max_error < SEW_OVERLAP_TOL;
    Ok(FockVerification {
        params: *p,
        resolution_max_deviation,
        phase_integral: integral.value,
        relative_density_max_deviation,
        sew_overlap_max_error,
        pass,
    })
}

impl FockVerification {
    pub fn report(&self) -> Report {
        let mut r = Report::new();
        r.int("n_sub", self.params.n_sub as u64)
            .int("n_max", self.params.n_max as u64)
            .real("i_max", self.params.i_max)
            .int("n_phi", self.params.n_phi as u64)
            .int("n_i", self.params.n_i as u64)
            .real("resolution_max_deviation", self.resolution_max_deviation)
            .pair("phase_integral", self.phase_integral.re, self.phase_integral.im)
            .real("relative_density_max_deviation", self.relative_density_max_deviation)
            .real("sew_overlap_max_error", self.sew_overlap_max_error)
            .flag("pass", self.pass);
        r
    }
}
