use std::f64::consts::PI;

use kickback::dephase::{epsilon_of_weight, sew_weight, KickSampler, PhaseWeight};
use kickback::entangle::canonical_two_level;
use kickback::eraser::{eigen_erasure_basis, erasure_report, sort_subensembles, EnvBasis};
use kickback::qcore::{fringe_probability, probe_grid, DensityOperator, WaySuperposition};
use kickback::rng::stream;
use kickback::sai::Description;

const MAX_POINTS: usize = 4096;

fn points(n: usize) -> Result<Vec<f64>, String> {
    if !(8..=MAX_POINTS).contains(&n) {
        return Err(format!("point count {n} outside 8..={MAX_POINTS}"));
    }
    Ok(probe_grid(n))
}

fn curve(rho: &DensityOperator, phases: &[f64]) -> Result<Vec<f64>, String> {
    phases
        .iter()
        .map(|&p| fringe_probability(rho, p).map_err(|e| e.to_string()))
        .collect()
}

pub fn fringe_curve(theta: f64, phi: f64, eps_modulus: f64, delta: f64, n: usize) -> Result<Vec<f64>, String> {
    let phases = points(n)?;
    let psi = WaySuperposition::new(theta, phi).map_err(|e| e.to_string())?;
    let m = canonical_two_level(eps_modulus, delta).map_err(|e| e.to_string())?;
    let rho = Description::Environment(m)
        .induced_state(&psi)
        .map_err(|e| e.to_string())?;
    curve(&rho, &phases)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Erasure {
    pub unconditioned: Vec<f64>,
    /// (outcome probability, visibility, fringe) per detector outcome.
    pub outcomes: Vec<(f64, f64, Vec<f64>)>,
}

impl Erasure {
    /// `[k, n, unconditioned.., (p, V, fringe..) × k]`.
    pub fn flatten(&self) -> Vec<f64> {
        let n = self.unconditioned.len();
        let mut out = vec![self.outcomes.len() as f64, n as f64];
        out.extend(&self.unconditioned);
        for (p, v, f) in &self.outcomes {
            out.push(*p);
            out.push(*v);
            out.extend(f);
        }
        out
    }
}

pub fn erasure_curves(theta: f64, eps_modulus: f64, basis: &str, n: usize) -> Result<Erasure, String> {
    let phases = points(n)?;
    let psi = WaySuperposition::new(theta, 0.0).map_err(|e| e.to_string())?;
    let m = canonical_two_level(eps_modulus, 0.0).map_err(|e| e.to_string())?;
    let basis = match basis {
        "eigen" => eigen_erasure_basis(&m).map_err(|e| e.to_string())?,
        "computational" => EnvBasis::computational(2),
        other => return Err(format!("unknown basis {other:?}")),
    };
    let joint = kickback::entangle::entangle_joint(&psi, &m);
    let reduced = kickback::entangle::reduced_system(&joint, 2).map_err(|e| e.to_string())?;
    let report = erasure_report(&psi, &m, &basis).map_err(|e| e.to_string())?;
    let subs = sort_subensembles(&joint, &basis).map_err(|e| e.to_string())?;
    let outcomes = subs
        .iter()
        .zip(&report.rows)
        .map(|(s, row)| Ok((s.probability, row.visibility, curve(&s.state, &phases)?)))
        .collect::<Result<_, String>>()?;
    Ok(Erasure {
        unconditioned: curve(&reduced, &phases)?,
        outcomes,
    })
}

pub fn kick_histogram(kind: &str, param: f64, shots: u32, bins: usize, seed: u64) -> Result<Vec<f64>, String> {
    if !(1..=MAX_POINTS).contains(&bins) {
        return Err(format!("bin count {bins} outside 1..={MAX_POINTS}"));
    }
    let w = match kind {
        "window" => PhaseWeight::window(0.0, param),
        "sew" => sew_weight(param),
        other => return Err(format!("unknown weight {other:?}")),
    }
    .map_err(|e| e.to_string())?;
    let sampler = KickSampler::new(&w).map_err(|e| e.to_string())?;
    let mut rng = stream(seed, 0);
    let width = 2.0 * PI / bins as f64;
    let mut counts = vec![0.0; bins];
    for _ in 0..shots {
        let k = ((sampler.sample(&mut rng) + PI) / width) as usize;
        counts[k.min(bins - 1)] += 1.0;
    }
    // density estimate: counts / (shots · width)
    let scale = 1.0 / (shots.max(1) as f64 * width);
    let mut out: Vec<f64> = counts.into_iter().map(|c| c * scale).collect();
    out.push(epsilon_of_weight(&w).map_err(|e| e.to_string())?.modulus());
    Ok(out)
}
