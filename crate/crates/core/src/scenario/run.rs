use num_complex::Complex64;
use rand::Rng;

use super::{BasisSpec, Scenario, ScenarioError, Sorting};
use crate::dephase::KickSampler;
use crate::entangle::entangle_joint;
use crate::eraser::{eigen_erasure_basis, sort_subensembles, EnvBasis};
use crate::estimate::{fourier_visibility, FringeCounts};
use crate::qcore::{
    fringe_probability, probe_grid, visibility, DensityOperator, Epsilon, Visibility, WaySuperposition,
};
use crate::report::{self, Report};
use crate::rng::stream;
use crate::sai::Description;

pub const CSV_HEADER: [&str; 6] = [
    "phi_probe",
    "probability",
    "label",
    "label_probability",
    "count",
    "shots",
];

/// CSV fringe data, the key-value report and whether every check held.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub csv: String,
    pub report: Report,
    pub pass: bool,
}

struct Branch {
    label: usize,
    probability: f64,
    state: DensityOperator,
}

/// Everything the runs need, computed once.
struct Prepared {
    psi: WaySuperposition,
    eps: Epsilon,
    phases: Vec<f64>,
    reduced: DensityOperator,
    branches: Vec<Branch>,
    tagged: bool,
}

impl Prepared {
    fn new(s: &Scenario) -> Result<Self, ScenarioError> {
        let psi = WaySuperposition::new(s.theta, s.phi)?;
        let eps = s.channel.epsilon()?;
        let reduced = s.channel.induced_state(&psi)?;
        let mut tagged = false;
        let branches = match (&s.sorting, &s.channel) {
            (None, _) => Vec::new(),
            (Some(Sorting::Tags(n)), _) => {
                tagged = true;
                (0..*n)
                    .map(|label| Branch {
                        label,
                        probability: 1.0 / *n as f64,
                        state: reduced.clone(),
                    })
                    .collect()
            }
            (Some(Sorting::Basis(kind)), Description::Environment(m)) => {
                let basis = match kind {
                    BasisSpec::Eigen => eigen_erasure_basis(m)?,
                    BasisSpec::Computational => EnvBasis::computational(m.dim()),
                    BasisSpec::Explicit(v) => EnvBasis::new(v.clone())?,
                };
                sort_subensembles(&entangle_joint(&psi, m), &basis)?
                    .into_iter()
                    .map(|sub| Branch {
                        label: sub.label,
                        probability: sub.probability,
                        state: sub.state,
                    })
                    .collect()
            }
            (Some(Sorting::Basis(_)), Description::Kicks(_)) => {
                return Err(ScenarioError::Invalid(
                    "kick channels have no environment to measure".into(),
                ))
            }
        };
        Ok(Self {
            psi,
            eps,
            phases: probe_grid(s.probe_grid),
            reduced,
            branches,
            tagged,
        })
    }

    fn probabilities(&self, rho: &DensityOperator) -> Result<Vec<f64>, ScenarioError> {
        Ok(self
            .phases
            .iter()
            .map(|&p| fringe_probability(rho, p))
            .collect::<crate::Result<_>>()?)
    }
}

fn write_csv(rows: &[[String; 6]]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

fn header(r: &mut Report, s: &Scenario, prep: &Prepared, mode: &str, v: &Visibility) {
    r.text("mode", mode)
        .text("channel", channel_name(&s.channel))
        .real("theta", s.theta)
        .real("phi", prep.psi.phi())
        .pair("eps", prep.eps.modulus(), prep.eps.delta())
        .int("probe_grid", s.probe_grid as u64)
        .real("visibility", v.visibility)
        .real("shift", v.shift);
}

fn channel_name(d: &Description) -> &'static str {
    match d {
        Description::Kicks(w) => w.kind_name(),
        Description::Environment(_) => "environment",
    }
}

/// Exact fringes: the unconditioned pattern, then one block per
/// subensemble.
pub fn run_analytic(s: &Scenario) -> Result<Outcome, ScenarioError> {
    let prep = Prepared::new(s)?;
    let mut rows = Vec::new();
    for (&phi, p) in prep.phases.iter().zip(prep.probabilities(&prep.reduced)?) {
        rows.push([
            report::real(phi),
            report::real(p),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
        ]);
    }
    let v = visibility(&prep.reduced)?;
    let mut r = Report::new();
    header(&mut r, s, &prep, "analytic", &v);
    let mut sub_reports = Report::new();
    for b in &prep.branches {
        let probs = prep.probabilities(&b.state)?;
        for (&phi, p) in prep.phases.iter().zip(probs) {
            rows.push([
                report::real(phi),
                report::real(p),
                b.label.to_string(),
                report::real(b.probability),
                String::new(),
                String::new(),
            ]);
        }
        let bv = visibility(&b.state)?;
        sub_reports
            .row(if prep.tagged { "tag" } else { "subensemble" })
            .int("label", b.label as u64)
            .real("probability", b.probability)
            .real("visibility", bv.visibility)
            .real("shift", bv.shift);
    }
    r.flag("pass", true).extend(&sub_reports);
    Ok(Outcome {
        csv: write_csv(&rows),
        report: r,
        pass: true,
    })
}

/// How one shot is resolved after its probe phase is fixed.
enum ShotModel<'a> {
    /// Draw a kick φ′ and detect with ρ₂₁ e^{iφ′}.
    Kicks {
        sampler: KickSampler,
        coherence: Complex64,
        tags: usize,
    },
    /// Detect from a fixed table of probabilities.
    Fixed(&'a [f64]),
    /// Draw an outcome from `cumulative`, then detect from its table.
    Sorted {
        cumulative: Vec<f64>,
        tables: Vec<Vec<f64>>,
    },
}

/// Counts per shard: index 0 unconditioned, then one per branch.
fn run_shard(
    model: &ShotModel,
    phases: &[f64],
    branches: usize,
    seed: u64,
    shard: u64,
    first: u64,
    last: u64,
) -> Vec<FringeCounts> {
    let grid = phases.len();
    let mut counts = vec![FringeCounts::new(grid); 1 + branches];
    let mut rng = stream(seed, shard);
    for i in first..last {
        let probe = (i % grid as u64) as usize;
        let (branch, p) = match model {
            ShotModel::Kicks {
                sampler,
                coherence,
                tags,
            } => {
                let kick = sampler.sample(&mut rng);
                let tag = if *tags > 0 {
                    Some(rng.random_range(0..*tags))
                } else {
                    None
                };
                let p = 0.5 * (1.0 + 2.0 * (Complex64::cis(kick - phases[probe]) * coherence).re);
                (tag, p.clamp(0.0, 1.0))
            }
            ShotModel::Fixed(table) => (None, table[probe]),
            ShotModel::Sorted { cumulative, tables } => {
                let u = rng.random::<f64>() * cumulative[cumulative.len() - 1];
                let k = cumulative.partition_point(|&c| c <= u).min(tables.len() - 1);
                (Some(k), tables[k][probe])
            }
        };
        let hit = rng.random::<f64>() < p;
        counts[0].record(probe, hit);
        if let Some(k) = branch {
            counts[1 + k].record(probe, hit);
        }
    }
    counts
}

/// 4/√n, the agreement window for an estimate from n shots.
fn bound(n: u64) -> f64 {
    4.0 / (n.max(1) as f64).sqrt()
}

/// Sampled fringes. Shots go round-robin over the probe grid; shard `k` of
/// `n` runs shots `[k·N/n, (k+1)·N/n)` on its own stream.
pub fn run_monte_carlo(s: &Scenario) -> Result<Outcome, ScenarioError> {
    if s.shots == 0 {
        return Err(ScenarioError::Invalid("Monte Carlo needs shots > 0".into()));
    }
    let prep = Prepared::new(s)?;
    let reduced_table = prep.probabilities(&prep.reduced)?;
    let model = match (&s.channel, prep.branches.is_empty() || prep.tagged) {
        (Description::Kicks(w), _) => ShotModel::Kicks {
            sampler: KickSampler::new(w)?,
            coherence: prep.psi.density().get(1, 0),
            tags: if prep.tagged { prep.branches.len() } else { 0 },
        },
        (Description::Environment(_), true) => ShotModel::Fixed(&reduced_table),
        (Description::Environment(_), false) => ShotModel::Sorted {
            cumulative: prep
                .branches
                .iter()
                .scan(0.0, |acc, b| {
                    *acc += b.probability;
                    Some(*acc)
                })
                .collect(),
            tables: prep
                .branches
                .iter()
                .map(|b| prep.probabilities(&b.state))
                .collect::<Result<_, _>>()?,
        },
    };
    let shards = s.shards as u64;
    let span = |k: u64| ((s.shots as u128 * k as u128) / shards as u128) as u64;
    let per_shard: Vec<Vec<FringeCounts>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..shards)
            .map(|k| {
                let (model, phases, n) = (&model, &prep.phases, prep.branches.len());
                scope.spawn(move || run_shard(model, phases, n, s.seed, k, span(k), span(k + 1)))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("shard worker panicked"))
            .collect()
    });
    let mut counts = vec![FringeCounts::new(s.probe_grid); 1 + prep.branches.len()];
    for shard in &per_shard {
        for (total, c) in counts.iter_mut().zip(shard) {
            total.merge(c);
        }
    }

    let mut rows = Vec::new();
    let push_rows = |rows: &mut Vec<[String; 6]>, table: &[f64], c: &FringeCounts, label: String, lp: String| {
        for (j, (&phi, &p)) in prep.phases.iter().zip(table).enumerate() {
            rows.push([
                report::real(phi),
                report::real(p),
                label.clone(),
                lp.clone(),
                c.hits[j].to_string(),
                c.shots[j].to_string(),
            ]);
        }
    };
    push_rows(&mut rows, &reduced_table, &counts[0], String::new(), String::new());

    let v = visibility(&prep.reduced)?;
    let mc = fourier_visibility(&prep.phases, &counts[0]);
    let total = counts[0].total_shots();
    let mut pass = (mc.visibility - v.visibility).abs() <= bound(total);
    let mut r = Report::new();
    header(&mut r, s, &prep, "monte_carlo", &v);
    r.int("shots", total)
        .int("seed", s.seed)
        .int("shards", shards)
        .real("mc_visibility", mc.visibility)
        .real("mc_shift", mc.shift)
        .real("bound", bound(total));
    let mut sub_reports = Report::new();
    for (b, c) in prep.branches.iter().zip(&counts[1..]) {
        push_rows(
            &mut rows,
            &prep.probabilities(&b.state)?,
            c,
            b.label.to_string(),
            report::real(b.probability),
        );
        let bv = visibility(&b.state)?;
        let n = c.total_shots();
        let bmc = fourier_visibility(&prep.phases, c);
        let frequency = n as f64 / total as f64;
        let agree =
            (bmc.visibility - bv.visibility).abs() <= bound(n) && (frequency - b.probability).abs() <= bound(total);
        pass &= agree;
        sub_reports
            .row(if prep.tagged { "tag" } else { "subensemble" })
            .int("label", b.label as u64)
            .real("probability", b.probability)
            .real("frequency", frequency)
            .real("visibility", bv.visibility)
            .real("mc_visibility", bmc.visibility)
            .int("shots", n)
            .real("bound", bound(n))
            .flag("agree", agree);
    }
    r.flag("pass", pass).extend(&sub_reports);
    Ok(Outcome {
        csv: write_csv(&rows),
        report: r,
        pass,
    })
}

/// Monte Carlo when the scenario asks for shots, exact fringes otherwise.
pub fn simulate(s: &Scenario) -> Result<Outcome, ScenarioError> {
    if s.shots > 0 {
        run_monte_carlo(s)
    } else {
        run_analytic(s)
    }
}
