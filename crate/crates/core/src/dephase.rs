//! The random-phase-kick picture. A normalized weight Ω(φ′) over kick
//! phases attenuates the coherence by its first circular moment
//! ε = ∫dφ′ Ω(φ′) e^{iφ′}.
//!
//! Weights come in four closed shapes, each with an exact or quantified ε:
//! point atoms, a flat window, a density sampled on a periodic grid, and
//! the cosine-modulated weight 1/(2π) + cos φ cos²(λt)/π that mimics the
//! two-cavity detector overlap.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::phase::wrap;
use crate::qcore::{dephased_density, DensityOperator, Epsilon, WaySuperposition};
use crate::quadrature::{gauss_legendre, periodic_trapezoid};

/// Tolerance on the total mass of a weight.
pub const MASS_TOL: f64 = 1e-9;

/// Grid resolution used when a continuous weight is turned into atoms.
pub const DEFAULT_GRID: usize = 256;

/// Smallest grid a `GridDensity` weight may use.
pub const MIN_GRID: usize = 8;

/// Rounding slack on the cos²(λt) ≤ 1/2 positivity condition.
const POSITIVITY_SLACK: f64 = 1e-12;

/// A point mass of Ω.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub phase: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeightKind {
    /// Point masses at phases in (−π, π].
    Atoms(Vec<Atom>),
    /// Flat density 1/(2χ) on |φ′ − center| ≤ χ.
    Window { center: f64, half_width: f64 },
    /// Density samples at the periodic trapezoid nodes −π + 2π(j+1)/N.
    GridDensity(Vec<f64>),
    /// 1/(2π) + cos φ · c/π with c = cos²(λt) ≤ 1/2.
    SewCosine { lambda_t: f64, cos_sq: f64 },
}

/// A nonnegative distribution Ω(φ′) of phase kicks.
///
/// Constructors check shape and sign; the unit-mass requirement is checked
/// where ε is extracted, see [`check_normalized`].
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseWeight {
    kind: WeightKind,
}

impl PhaseWeight {
    pub fn atoms<I: IntoIterator<Item = (f64, f64)>>(atoms: I) -> Result<Self> {
        let atoms: Vec<Atom> = atoms
            .into_iter()
            .map(|(phase, weight)| {
                if !phase.is_finite() {
                    return Err(Error::InvalidWeight(format!("atom phase {phase} is not finite")));
                }
                if !(weight > 0.0 && weight.is_finite()) {
                    return Err(Error::InvalidWeight(format!("atom weight {weight} is not positive")));
                }
                Ok(Atom {
                    phase: wrap(phase),
                    weight,
                })
            })
            .collect::<Result<_>>()?;
        if atoms.is_empty() {
            return Err(Error::InvalidWeight("no atoms".into()));
        }
        Ok(Self {
            kind: WeightKind::Atoms(atoms),
        })
    }

    pub fn window(center: f64, half_width: f64) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::InvalidWeight(format!("window center {center} is not finite")));
        }
        if !(half_width > 0.0 && half_width <= PI) {
            return Err(Error::Domain {
                name: "half_width",
                value: half_width,
                allowed: "(0, π]",
            });
        }
        Ok(Self {
            kind: WeightKind::Window {
                center: wrap(center),
                half_width,
            },
        })
    }

    pub fn grid(density: Vec<f64>) -> Result<Self> {
        if density.len() < MIN_GRID {
            return Err(Error::GridTooSmall(format!(
                "grid density needs at least {MIN_GRID} samples, got {}",
                density.len()
            )));
        }
        if let Some(bad) = density.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidWeight(format!("grid density value {bad} is negative")));
        }
        Ok(Self {
            kind: WeightKind::GridDensity(density),
        })
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            WeightKind::Atoms(_) => "atoms",
            WeightKind::Window { .. } => "window",
            WeightKind::GridDensity(_) => "grid",
            WeightKind::SewCosine { .. } => "sew",
        }
    }

    /// Pointwise density value, or `None` for atoms.
    pub fn density(&self, phi: f64) -> Option<f64> {
        let phi = wrap(phi);
        match &self.kind {
            WeightKind::Atoms(_) => None,
            WeightKind::Window { center, half_width } => {
                let inside = wrap(phi - center).abs() <= *half_width;
                Some(if inside { 0.5 / half_width } else { 0.0 })
            }
            WeightKind::GridDensity(samples) => {
                let n = samples.len();
                let h = TAU / n as f64;
                // nearest node: node j sits at −π + h(j+1)
                let j = (((phi + PI) / h).round() as isize - 1).rem_euclid(n as isize);
                Some(samples[j as usize])
            }
            WeightKind::SewCosine { cos_sq, .. } => Some(sew_density(*cos_sq, phi)),
        }
    }

    /// Point masses carrying the same ε as this weight.
    ///
    /// Atoms are returned as they are and a grid density as its own nodes.
    /// The cosine weight becomes `n` midpoint cells; for n ≥ 3 that is exact
    /// for its first harmonic. A window becomes `n` Gauss–Legendre nodes over
    /// its support, matching sin χ/χ to rounding. Zero-mass cells are dropped.
    pub fn to_atoms(&self, n: usize) -> Result<Vec<Atom>> {
        let atoms = match &self.kind {
            WeightKind::Atoms(atoms) => atoms.clone(),
            WeightKind::Window { center, half_width } => {
                let rule = gauss_legendre(n.max(1), center - half_width, center + half_width);
                rule.nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(&x, &w)| Atom {
                        phase: wrap(x),
                        weight: w / (2.0 * half_width),
                    })
                    .collect()
            }
            WeightKind::GridDensity(samples) => {
                let rule = periodic_trapezoid(samples.len());
                rule.nodes
                    .iter()
                    .zip(samples)
                    .map(|(&x, &f)| Atom {
                        phase: wrap(x),
                        weight: f * TAU / samples.len() as f64,
                    })
                    .collect()
            }
            WeightKind::SewCosine { cos_sq, .. } => {
                if n < 3 {
                    return Err(Error::GridTooSmall(format!(
                        "cosine weight needs at least 3 cells, got {n}"
                    )));
                }
                let h = TAU / n as f64;
                (0..n)
                    .map(|k| {
                        let mid = -PI + h * (k as f64 + 0.5);
                        Atom {
                            phase: mid,
                            weight: h * sew_density(*cos_sq, mid),
                        }
                    })
                    .collect()
            }
        };
        Ok(atoms.into_iter().filter(|a| a.weight > 0.0).collect())
    }
}

fn sew_density(cos_sq: f64, phi: f64) -> f64 {
    (1.0 + 2.0 * cos_sq * phi.cos()) / TAU
}

/// Total mass of Ω. Atoms are summed exactly, grids use the periodic
/// trapezoid, the window and cosine weights have unit mass analytically.
pub fn check_normalized(w: &PhaseWeight) -> f64 {
    match &w.kind {
        WeightKind::Atoms(atoms) => atoms.iter().map(|a| a.weight).sum(),
        WeightKind::Window { .. } | WeightKind::SewCosine { .. } => 1.0,
        WeightKind::GridDensity(samples) => samples.iter().sum::<f64>() * TAU / samples.len() as f64,
    }
}

fn require_normalized(w: &PhaseWeight) -> Result<()> {
    let mass = check_normalized(w);
    if (mass - 1.0).abs() > MASS_TOL {
        return Err(Error::Unnormalized(mass));
    }
    Ok(())
}

/// ε = ∫dφ′ Ω(φ′) e^{iφ′}.
pub fn epsilon_of_weight(w: &PhaseWeight) -> Result<Epsilon> {
    require_normalized(w)?;
    let z = match &w.kind {
        WeightKind::Atoms(atoms) => atoms.iter().map(|a| Complex64::from_polar(a.weight, a.phase)).sum(),
        WeightKind::Window { center, half_width } => Complex64::from_polar(half_width.sin() / half_width, *center),
        WeightKind::GridDensity(samples) => {
            let rule = periodic_trapezoid(samples.len());
            rule.nodes
                .iter()
                .zip(&rule.weights)
                .zip(samples)
                .map(|((&x, &h), &f)| Complex64::from_polar(h * f, x))
                .sum()
        }
        WeightKind::SewCosine { cos_sq, .. } => Complex64::new(*cos_sq, 0.0),
    };
    Epsilon::from_complex(z)
}

/// Two atoms at δ_ε and δ_ε + π with masses (1 ± |ε|)/2; a single atom
/// when |ε| = 1.
pub fn delta_pair_weight(eps: Epsilon) -> PhaseWeight {
    let m = eps.modulus();
    let d = eps.delta();
    let mut atoms = vec![Atom {
        phase: d,
        weight: (1.0 + m) / 2.0,
    }];
    if m < 1.0 {
        atoms.push(Atom {
            phase: wrap(d + PI),
            weight: (1.0 - m) / 2.0,
        });
    }
    PhaseWeight {
        kind: WeightKind::Atoms(atoms),
    }
}

/// Half-width χ ∈ (0, π] with sin χ/χ = `modulus`, for 0 < modulus < 1.
pub fn window_half_width(modulus: f64) -> f64 {
    let (mut lo, mut hi) = (1e-9_f64, PI);
    // sin χ/χ falls strictly on the bracket, so the root is unique
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if mid.sin() / mid > modulus {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Flat window centered on `delta` whose ε has the given modulus.
///
/// |ε| = 1 has no window (χ → 0) and degenerates to a single atom at δ.
pub fn window_weight(eps_modulus: f64, delta: f64) -> Result<PhaseWeight> {
    Epsilon::new(eps_modulus, delta)?;
    if eps_modulus == 1.0 {
        return PhaseWeight::atoms([(delta, 1.0)]);
    }
    if eps_modulus == 0.0 {
        return PhaseWeight::window(delta, PI);
    }
    PhaseWeight::window(delta, window_half_width(eps_modulus))
}

/// The cosine weight 1/(2π) + cos φ cos²(λt)/π, positive only while
/// cos²(λt) ≤ 1/2.
pub fn sew_weight(lambda_t: f64) -> Result<PhaseWeight> {
    if !lambda_t.is_finite() {
        return Err(Error::Domain {
            name: "lambda_t",
            value: lambda_t,
            allowed: "the finite reals",
        });
    }
    let cos_sq = lambda_t.cos().powi(2);
    if cos_sq > 0.5 + POSITIVITY_SLACK {
        return Err(Error::Positivity(cos_sq));
    }
    Ok(PhaseWeight {
        kind: WeightKind::SewCosine {
            lambda_t,
            cos_sq: cos_sq.min(0.5),
        },
    })
}

/// ρ₀ averaged over kicks drawn from Ω. Only ε matters, so this goes
/// through [`epsilon_of_weight`].
pub fn apply_phase_kicks(psi0: &WaySuperposition, w: &PhaseWeight) -> Result<DensityOperator> {
    Ok(dephased_density(psi0, epsilon_of_weight(w)?))
}

#[derive(Debug, Clone)]
enum Sampler {
    Discrete {
        phases: Vec<f64>,
        cumulative: Vec<f64>,
    },
    Uniform {
        center: f64,
        half_width: f64,
    },
    /// Piecewise-constant density on equal cells starting at `start`.
    Cells {
        start: f64,
        width: f64,
        cumulative: Vec<f64>,
    },
}

/// Precomputed inverse-CDF tables for drawing kicks from one weight.
#[derive(Debug, Clone)]
pub struct KickSampler {
    sampler: Sampler,
}

fn cumulate(masses: impl Iterator<Item = f64>) -> Vec<f64> {
    masses
        .scan(0.0, |acc, m| {
            *acc += m;
            Some(*acc)
        })
        .collect()
}

impl KickSampler {
    pub fn new(w: &PhaseWeight) -> Result<Self> {
        require_normalized(w)?;
        let sampler = match &w.kind {
            WeightKind::Atoms(atoms) => Sampler::Discrete {
                phases: atoms.iter().map(|a| a.phase).collect(),
                cumulative: cumulate(atoms.iter().map(|a| a.weight)),
            },
            WeightKind::Window { center, half_width } => Sampler::Uniform {
                center: *center,
                half_width: *half_width,
            },
            WeightKind::GridDensity(samples) => {
                let width = TAU / samples.len() as f64;
                Sampler::Cells {
                    // cell j is centered on node −π + width(j+1)
                    start: -PI + 0.5 * width,
                    width,
                    cumulative: cumulate(samples.iter().copied()),
                }
            }
            WeightKind::SewCosine { cos_sq, .. } => {
                let n = DEFAULT_GRID;
                let width = TAU / n as f64;
                let cdf = |x: f64| (x + PI) / TAU + cos_sq * x.sin() / PI;
                Sampler::Cells {
                    start: -PI,
                    width,
                    cumulative: cumulate((0..n).map(|k| {
                        let a = -PI + width * k as f64;
                        (cdf(a + width) - cdf(a)).max(0.0)
                    })),
                }
            }
        };
        Ok(Self { sampler })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.sampler {
            Sampler::Discrete { phases, cumulative } => {
                let u = rng.random::<f64>() * cumulative[cumulative.len() - 1];
                let k = cumulative.partition_point(|&c| c <= u).min(phases.len() - 1);
                phases[k]
            }
            Sampler::Uniform { center, half_width } => wrap(center + half_width * (2.0 * rng.random::<f64>() - 1.0)),
            Sampler::Cells {
                start,
                width,
                cumulative,
            } => {
                let total = cumulative[cumulative.len() - 1];
                let u = rng.random::<f64>() * total;
                let k = cumulative.partition_point(|&c| c <= u).min(cumulative.len() - 1);
                let below = if k == 0 { 0.0 } else { cumulative[k - 1] };
                let mass = cumulative[k] - below;
                let frac = if mass > 0.0 { (u - below) / mass } else { 0.5 };
                wrap(start + width * (k as f64 + frac))
            }
        }
    }
}

/// Draws one kick phase from Ω.
pub fn sample_kick<R: Rng + ?Sized>(w: &PhaseWeight, rng: &mut R) -> Result<f64> {
    Ok(KickSampler::new(w)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{CMatrix, CVector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

    fn eps_value(w: &PhaseWeight) -> Complex64 {
        epsilon_of_weight(w).unwrap().value()
    }

    #[test]
    fn normalization_examples() {
        let w = PhaseWeight::atoms([(0.0, 0.75), (PI, 0.25)]).unwrap();
        assert_eq!(check_normalized(&w), 1.0);
        assert_eq!(check_normalized(&PhaseWeight::window(0.0, PI).unwrap()), 1.0);
        let flat = PhaseWeight::grid(vec![1.0 / TAU; 128]).unwrap();
        assert!((check_normalized(&flat) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unnormalized_weight_is_rejected() {
        let w = PhaseWeight::atoms([(0.0, 0.5), (1.0, 0.25)]).unwrap();
        assert_eq!(epsilon_of_weight(&w), Err(Error::Unnormalized(0.75)));
        assert!(KickSampler::new(&w).is_err());
        assert!(PhaseWeight::atoms([(0.0, -1.0)]).is_err());
        assert!(PhaseWeight::grid(vec![0.1; 4]).is_err());
        assert!(PhaseWeight::window(0.0, 0.0).is_err());
        assert!(PhaseWeight::window(0.0, 4.0).is_err());
    }

    #[test]
    fn epsilon_examples() {
        let w = PhaseWeight::atoms([(0.0, 0.75), (PI, 0.25)]).unwrap();
        assert!((eps_value(&w) - 0.5).norm() < 1e-15);
        for center in [0.0, 1.0, -2.5] {
            let e = epsilon_of_weight(&PhaseWeight::window(center, PI).unwrap()).unwrap();
            assert!(e.modulus() < 1e-15);
        }
        assert!((eps_value(&sew_weight(FRAC_PI_3).unwrap()) - 0.25).norm() < 1e-15);
    }

    #[test]
    fn sew_epsilon_matches_quadrature_oracle() {
        for lt in [FRAC_PI_3, FRAC_PI_4, FRAC_PI_2, 1.3, 2.0] {
            let w = sew_weight(lt).unwrap();
            // independent route: trapezoid over the formula written out here
            let n = 1024;
            let h = TAU / n as f64;
            let c2 = lt.cos().powi(2);
            let oracle: Complex64 = (0..n)
                .map(|j| {
                    let x = -PI + h * j as f64;
                    Complex64::from_polar(h * (1.0 / TAU + x.cos() * c2 / PI), x)
                })
                .sum();
            assert!((eps_value(&w) - oracle).norm() < 1e-12, "λt={lt}");
        }
    }

    #[test]
    fn delta_pair_examples() {
        let w = delta_pair_weight(Epsilon::new(0.6, 0.0).unwrap());
        let WeightKind::Atoms(a) = w.kind() else { panic!() };
        assert_eq!(a.len(), 2);
        assert!((a[0].phase).abs() < 1e-15 && (a[0].weight - 0.8).abs() < 1e-15);
        assert!((a[1].phase - PI).abs() < 1e-15 && (a[1].weight - 0.2).abs() < 1e-15);

        let w = delta_pair_weight(Epsilon::ZERO);
        let WeightKind::Atoms(a) = w.kind() else { panic!() };
        assert_eq!((a[0].weight, a[1].weight), (0.5, 0.5));
        assert!((a[1].phase - PI).abs() < 1e-15);

        let w = delta_pair_weight(Epsilon::new(1.0, 0.3).unwrap());
        assert_eq!(
            w.kind(),
            &WeightKind::Atoms(vec![Atom {
                phase: 0.3,
                weight: 1.0
            }])
        );
    }

    #[test]
    fn delta_pair_round_trip() {
        for m in [0.0, 0.1, 0.5, 0.9, 1.0] {
            for d in [-3.0, -1.0, 0.0, 0.7, PI] {
                let eps = Epsilon::new(m, d).unwrap();
                let back = epsilon_of_weight(&delta_pair_weight(eps)).unwrap();
                assert!((back.value() - eps.value()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn window_examples() {
        let w = window_weight(0.0, 0.2).unwrap();
        assert_eq!(
            w.kind(),
            &WeightKind::Window {
                center: 0.2,
                half_width: PI
            }
        );
        let w = window_weight(2.0 / PI, 0.0).unwrap();
        let WeightKind::Window { half_width, .. } = *w.kind() else {
            panic!()
        };
        assert!((half_width - FRAC_PI_2).abs() < 1e-10);
        let w = window_weight(1.0, 0.4).unwrap();
        assert_eq!(
            w.kind(),
            &WeightKind::Atoms(vec![Atom {
                phase: 0.4,
                weight: 1.0
            }])
        );
        for m in [0.01, 0.3, 0.77, 0.999] {
            let e = epsilon_of_weight(&window_weight(m, -1.0).unwrap()).unwrap();
            assert!((e.modulus() - m).abs() < 1e-11, "m={m}");
            assert!((e.delta() + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sew_weight_positivity() {
        let w = sew_weight(FRAC_PI_4).unwrap();
        assert!(w.density(PI).unwrap().abs() < 1e-17);
        assert!((w.density(0.0).unwrap() - 1.0 / PI).abs() < 1e-15);
        let w = sew_weight(FRAC_PI_2).unwrap();
        for phi in [-3.0, 0.0, 1.0] {
            assert!((w.density(phi).unwrap() - 1.0 / TAU).abs() < 1e-15);
        }
        assert!(matches!(sew_weight(0.0), Err(Error::Positivity(c)) if c == 1.0));
        assert!(sew_weight(0.7).is_err());
    }

    #[test]
    fn apply_phase_kicks_examples() {
        let psi = WaySuperposition::new(1.2, 0.4).unwrap();
        let rho = apply_phase_kicks(&psi, &PhaseWeight::atoms([(0.0, 1.0)]).unwrap()).unwrap();
        assert!(rho.max_deviation(&psi.density()) < 1e-15);

        let psi = WaySuperposition::new(FRAC_PI_2, 0.0).unwrap();
        let rho = apply_phase_kicks(&psi, &PhaseWeight::window(0.0, PI).unwrap()).unwrap();
        assert!(rho.max_deviation(&DensityOperator::maximally_mixed(2).unwrap()) < 1e-15);
    }

    #[test]
    fn apply_phase_kicks_matches_explicit_mixture() {
        // average of kicked pure-state projectors, built by hand
        let kicks = [(0.0, 0.8), (PI, 0.2)];
        let psi = WaySuperposition::new(FRAC_PI_2, 0.0).unwrap();
        let mut mixture = CMatrix::zeros(2, 2);
        for (kick, p) in kicks {
            let half = psi.theta() / 2.0;
            let v = CVector::from_column_slice(&[
                Complex64::new(half.cos(), 0.0),
                Complex64::from_polar(half.sin(), psi.phi() + kick),
            ]);
            mixture += (&v * v.adjoint()).scale(p);
        }
        let w = PhaseWeight::atoms(kicks).unwrap();
        let rho = apply_phase_kicks(&psi, &w).unwrap();
        assert!((rho.get(1, 0) - Complex64::new(0.3, 0.0)).norm() < 1e-15);
        assert!(crate::qcore::max_abs_diff(rho.matrix(), &mixture) < 1e-12);
    }

    #[test]
    fn populations_survive_kicks() {
        let psi = WaySuperposition::new(0.6, -2.0).unwrap();
        let [p1, p2] = psi.populations();
        for w in [
            PhaseWeight::window(0.5, 1.0).unwrap(),
            sew_weight(1.0).unwrap(),
            delta_pair_weight(Epsilon::new(0.2, 1.0).unwrap()),
        ] {
            let rho = apply_phase_kicks(&psi, &w).unwrap();
            assert!((rho.get(0, 0).re - p1).abs() < 1e-14);
            assert!((rho.get(1, 1).re - p2).abs() < 1e-14);
        }
    }

    #[test]
    fn grid_quadrature_converges() {
        let smooth = |n: usize| {
            let rule = periodic_trapezoid(n);
            let raw: Vec<f64> = rule
                .nodes
                .iter()
                .map(|x| (1.5 * x.cos() + 0.3 * x.sin()).exp())
                .collect();
            let mass = raw.iter().sum::<f64>() * TAU / n as f64;
            PhaseWeight::grid(raw.into_iter().map(|v| v / mass).collect()).unwrap()
        };
        let a = eps_value(&smooth(256));
        let b = eps_value(&smooth(512));
        assert!((a - b).norm() < 1e-8);
    }

    #[test]
    fn grid_density_lookup_hits_nodes() {
        let samples: Vec<f64> = (0..8).map(|j| j as f64).collect();
        let w = PhaseWeight::grid(samples).unwrap();
        let rule = periodic_trapezoid(8);
        for (j, x) in rule.nodes.iter().enumerate() {
            assert_eq!(w.density(*x), Some(j as f64));
        }
    }

    #[test]
    fn to_atoms_preserves_epsilon() {
        for w in [
            PhaseWeight::window(0.3, 0.9).unwrap(),
            PhaseWeight::window(0.0, PI).unwrap(),
            sew_weight(1.1).unwrap(),
            PhaseWeight::grid(vec![1.0 / TAU; 16]).unwrap(),
        ] {
            let atoms = w.to_atoms(DEFAULT_GRID).unwrap();
            let mass: f64 = atoms.iter().map(|a| a.weight).sum();
            assert!((mass - 1.0).abs() < 1e-12);
            let z: Complex64 = atoms.iter().map(|a| Complex64::from_polar(a.weight, a.phase)).sum();
            assert!((z - eps_value(&w)).norm() < 1e-12, "{}", w.kind_name());
        }
    }

    #[test]
    fn deterministic_atom_always_returns_its_phase() {
        let w = PhaseWeight::atoms([(0.3, 1.0)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(sample_kick(&w, &mut rng).unwrap(), 0.3);
        }
    }

    #[test]
    fn atom_frequencies_within_binomial_bound() {
        let w = PhaseWeight::atoms([(0.0, 0.8), (PI, 0.2)]).unwrap();
        let sampler = KickSampler::new(&w).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 100_000;
        let zeros = (0..n).filter(|_| sampler.sample(&mut rng) == 0.0).count();
        // 3σ = 3·sqrt(0.8·0.2/n) ≈ 0.0038, bound 0.012
        assert!((zeros as f64 / n as f64 - 0.8).abs() < 0.012);
    }

    fn mc_epsilon(w: &PhaseWeight, n: usize, seed: u64) -> Complex64 {
        let sampler = KickSampler::new(w).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| Complex64::cis(sampler.sample(&mut rng)))
            .sum::<Complex64>()
            / n as f64
    }

    #[test]
    fn window_samples_reproduce_two_over_pi() {
        let w = PhaseWeight::window(0.0, FRAC_PI_2).unwrap();
        let z = mc_epsilon(&w, 100_000, 3);
        assert!((z - 2.0 / PI).norm() < 0.01);
    }

    #[test]
    fn monte_carlo_epsilon_converges_for_every_variant() {
        let flat_plus_bump: Vec<f64> = periodic_trapezoid(64)
            .nodes
            .iter()
            .map(|x| (1.0 + 0.8 * (x - 1.0).cos()) / TAU)
            .collect();
        for (i, w) in [
            PhaseWeight::atoms([(0.2, 0.3), (-1.0, 0.5), (2.5, 0.2)]).unwrap(),
            PhaseWeight::window(-1.2, 0.7).unwrap(),
            PhaseWeight::grid(flat_plus_bump).unwrap(),
            sew_weight(1.0).unwrap(),
        ]
        .iter()
        .enumerate()
        {
            let z = mc_epsilon(w, 100_000, 11 + i as u64);
            assert!(
                (z - eps_value(w)).norm() < 0.015,
                "{}: {z} vs {}",
                w.kind_name(),
                eps_value(w)
            );
        }
    }
}
