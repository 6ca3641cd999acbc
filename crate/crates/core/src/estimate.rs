//! Fringe estimates from detection counts.

use num_complex::Complex64;

use crate::phase::wrap;
use crate::qcore::{Visibility, SHIFT_FLOOR};

/// Shots and detections at each probe phase of a grid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FringeCounts {
    pub shots: Vec<u64>,
    pub hits: Vec<u64>,
}

impl FringeCounts {
    pub fn new(grid: usize) -> Self {
        Self {
            shots: vec![0; grid],
            hits: vec![0; grid],
        }
    }

    pub fn record(&mut self, probe: usize, hit: bool) {
        self.shots[probe] += 1;
        self.hits[probe] += u64::from(hit);
    }

    pub fn merge(&mut self, other: &FringeCounts) {
        for (a, b) in self.shots.iter_mut().zip(&other.shots) {
            *a += b;
        }
        for (a, b) in self.hits.iter_mut().zip(&other.hits) {
            *a += b;
        }
    }

    pub fn total_shots(&self) -> u64 {
        self.shots.iter().sum()
    }
}

/// First circular Fourier coefficient of the detection frequencies:
/// V̂ = 2|Σ_j f_j e^{−iφ_j}| / Σ_j f_j, f_j = hits_j / shots_j.
///
/// With equal shots per phase this is 2|Σ c_j e^{−iφ_j}| / Σ c_j on the raw
/// counts. Phases without shots are skipped.
pub fn fourier_visibility(phases: &[f64], counts: &FringeCounts) -> Visibility {
    let mut coeff = Complex64::ZERO;
    let mut total = 0.0;
    for ((&phi, &n), &k) in phases.iter().zip(&counts.shots).zip(&counts.hits) {
        if n == 0 {
            continue;
        }
        let f = k as f64 / n as f64;
        coeff += Complex64::from_polar(f, -phi);
        total += f;
    }
    if total == 0.0 {
        return Visibility {
            visibility: 0.0,
            shift: 0.0,
        };
    }
    let visibility = 2.0 * coeff.norm() / total;
    let shift = if coeff.norm() < SHIFT_FLOOR {
        0.0
    } else {
        wrap(-coeff.arg())
    };
    Visibility { visibility, shift }
}
