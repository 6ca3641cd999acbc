use std::path::{Path, PathBuf};

use num_complex::Complex64;
use toml::{Table, Value};

use super::{BasisSpec, Scenario, ScenarioError, Sorting, DEFAULT_PROBE_GRID};
use crate::dephase::{check_normalized, sew_weight, PhaseWeight, MASS_TOL, MIN_GRID};
use crate::entangle::{canonical_two_level, EnvironmentModel};
use crate::qcore::{CMatrix, CVector, DensityOperator, UnitaryOperator, WaySuperposition};
use crate::sai::Description;

const TOP_KEYS: &[&str] = &[
    "theta",
    "phi",
    "probe_grid",
    "shots",
    "seed",
    "shards",
    "output",
    "channel",
    "erasure",
];
const ERASURE_KEYS: &[&str] = &["basis", "vectors", "tags"];

const KINDS: &[(&str, &[&str])] = &[
    ("atoms", &["phases", "weights"]),
    ("window", &["center", "half_width"]),
    ("grid", &["density"]),
    ("sew", &["lambda_t"]),
    ("canonical", &["eps_modulus", "delta"]),
    ("explicit", &["rho_env", "u_env"]),
];

fn invalid(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid(msg.into())
}

fn check_keys(table: &Table, prefix: &str, allowed: &[&str]) -> Result<(), ScenarioError> {
    for key in table.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(ScenarioError::UnknownKey(format!("{prefix}{key}")));
        }
    }
    Ok(())
}

fn as_real(v: &Value, key: &str) -> Result<f64, ScenarioError> {
    match v {
        Value::Float(x) => Ok(*x),
        Value::Integer(n) => Ok(*n as f64),
        _ => Err(invalid(format!("{key} must be a number"))),
    }
}

fn real(t: &Table, key: &str, name: &str) -> Result<Option<f64>, ScenarioError> {
    t.get(key).map(|v| as_real(v, name)).transpose()
}

fn required_real(t: &Table, key: &str, name: &str) -> Result<f64, ScenarioError> {
    real(t, key, name)?.ok_or_else(|| invalid(format!("{name} is required")))
}

fn count(t: &Table, key: &str) -> Result<Option<u64>, ScenarioError> {
    match t.get(key) {
        None => Ok(None),
        Some(Value::Integer(n)) if *n >= 0 => Ok(Some(*n as u64)),
        Some(_) => Err(invalid(format!("{key} must be a nonnegative integer"))),
    }
}

fn reals(v: &Value, name: &str) -> Result<Vec<f64>, ScenarioError> {
    v.as_array()
        .ok_or_else(|| invalid(format!("{name} must be an array of numbers")))?
        .iter()
        .map(|x| as_real(x, name))
        .collect()
}

fn complexes(v: &Value, name: &str) -> Result<Vec<Complex64>, ScenarioError> {
    let bad = || invalid(format!("{name} must be a list of [re, im] pairs"));
    v.as_array()
        .ok_or_else(bad)?
        .iter()
        .map(|pair| match pair.as_array().map(Vec::as_slice) {
            Some([re, im]) => Ok(Complex64::new(as_real(re, name)?, as_real(im, name)?)),
            _ => Err(bad()),
        })
        .collect()
}

fn square(entries: Vec<Complex64>, name: &str) -> Result<CMatrix, ScenarioError> {
    let d = (entries.len() as f64).sqrt().round() as usize;
    if d == 0 || d * d != entries.len() {
        return Err(invalid(format!(
            "{name} has {} entries, not a square count",
            entries.len()
        )));
    }
    Ok(CMatrix::from_row_slice(d, d, &entries))
}

fn model_error(name: &str) -> impl Fn(crate::Error) -> ScenarioError + '_ {
    move |e| invalid(format!("{name}: {e}"))
}

fn parse_channel(t: &Table) -> Result<Description, ScenarioError> {
    let all: Vec<&str> = std::iter::once("kind")
        .chain(KINDS.iter().flat_map(|(_, f)| f.iter().copied()))
        .collect();
    check_keys(t, "channel.", &all)?;
    let kind = t
        .get("kind")
        .ok_or_else(|| invalid("channel.kind is required"))?
        .as_str()
        .ok_or_else(|| invalid("channel.kind must be a string"))?;
    let fields = KINDS.iter().find(|(k, _)| *k == kind).map(|(_, f)| *f).ok_or_else(|| {
        invalid(format!(
            "channel.kind = \"{kind}\" is not one of atoms, window, grid, sew, canonical, explicit"
        ))
    })?;
    for key in t.keys().filter(|k| *k != "kind") {
        if !fields.contains(&key.as_str()) {
            return Err(invalid(format!("channel.{key} does not apply to kind = \"{kind}\"")));
        }
    }
    let req = |key: &str| {
        t.get(key)
            .ok_or_else(|| invalid(format!("channel.{key} is required for kind = \"{kind}\"")))
    };
    let weight = match kind {
        "atoms" => {
            let phases = reals(req("phases")?, "channel.phases")?;
            let weights = reals(req("weights")?, "channel.weights")?;
            if phases.len() != weights.len() {
                return Err(invalid(format!(
                    "channel.phases has {} entries but channel.weights has {}",
                    phases.len(),
                    weights.len()
                )));
            }
            Some(PhaseWeight::atoms(phases.into_iter().zip(weights)).map_err(model_error("channel"))?)
        }
        "window" => {
            let center = real(t, "center", "channel.center")?.unwrap_or(0.0);
            let half_width = required_real(t, "half_width", "channel.half_width")?;
            Some(PhaseWeight::window(center, half_width).map_err(model_error("channel"))?)
        }
        "grid" => {
            let density = reals(req("density")?, "channel.density")?;
            if density.len() < MIN_GRID {
                return Err(invalid(format!("channel.density needs at least {MIN_GRID} samples")));
            }
            Some(PhaseWeight::grid(density).map_err(model_error("channel"))?)
        }
        "sew" => {
            let lambda_t = required_real(t, "lambda_t", "channel.lambda_t")?;
            Some(sew_weight(lambda_t).map_err(model_error("channel.lambda_t"))?)
        }
        _ => None,
    };
    if let Some(w) = weight {
        let mass = check_normalized(&w);
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(invalid(format!("channel weight has total mass {mass}, expected 1")));
        }
        return Ok(Description::Kicks(w));
    }
    let model = match kind {
        "canonical" => {
            let modulus = required_real(t, "eps_modulus", "channel.eps_modulus")?;
            let delta = real(t, "delta", "channel.delta")?.unwrap_or(0.0);
            canonical_two_level(modulus, delta).map_err(model_error("channel"))?
        }
        _ => {
            let rho = square(complexes(req("rho_env")?, "channel.rho_env")?, "channel.rho_env")?;
            let u = square(complexes(req("u_env")?, "channel.u_env")?, "channel.u_env")?;
            EnvironmentModel::new(
                DensityOperator::new(rho).map_err(model_error("channel.rho_env"))?,
                UnitaryOperator::new(u).map_err(model_error("channel.u_env"))?,
            )
            .map_err(model_error("channel"))?
        }
    };
    Ok(Description::Environment(model))
}

fn parse_sorting(t: &Table, channel: &Description) -> Result<Sorting, ScenarioError> {
    check_keys(t, "erasure.", ERASURE_KEYS)?;
    match channel {
        Description::Kicks(_) => {
            if let Some(key) = ["basis", "vectors"].into_iter().find(|k| t.contains_key(*k)) {
                return Err(invalid(format!(
                    "erasure.{key} needs an environment channel; kick channels take erasure.tags"
                )));
            }
            match count(t, "tags")? {
                Some(0) => Err(invalid("erasure.tags must be at least 1")),
                Some(n) => Ok(Sorting::Tags(n as usize)),
                None => Ok(Sorting::Tags(super::DEFAULT_TAGS)),
            }
        }
        Description::Environment(m) => {
            if t.contains_key("tags") {
                return Err(invalid("erasure.tags applies to kick channels only"));
            }
            let basis = match t.get("basis").map(|v| v.as_str()) {
                None | Some(Some("eigen")) => BasisSpec::Eigen,
                Some(Some("computational")) => BasisSpec::Computational,
                Some(Some("explicit")) => {
                    let list = t
                        .get("vectors")
                        .and_then(Value::as_array)
                        .ok_or_else(|| invalid("erasure.vectors is required for basis = \"explicit\""))?;
                    let vectors = list
                        .iter()
                        .map(|v| complexes(v, "erasure.vectors").map(CVector::from_vec))
                        .collect::<Result<Vec<_>, _>>()?;
                    if vectors.len() != m.dim() || vectors.iter().any(|v| v.len() != m.dim()) {
                        return Err(invalid(format!(
                            "erasure.vectors must be {0} vectors of length {0}",
                            m.dim()
                        )));
                    }
                    crate::eraser::EnvBasis::new(vectors.clone()).map_err(model_error("erasure.vectors"))?;
                    BasisSpec::Explicit(vectors)
                }
                Some(_) => {
                    return Err(invalid(
                        "erasure.basis must be \"eigen\", \"computational\" or \"explicit\"",
                    ))
                }
            };
            if t.contains_key("vectors") && !matches!(basis, BasisSpec::Explicit(_)) {
                return Err(invalid("erasure.vectors applies to basis = \"explicit\" only"));
            }
            Ok(Sorting::Basis(basis))
        }
    }
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let doc: Table = text
        .parse()
        .map_err(|e: toml::de::Error| ScenarioError::Parse(e.to_string()))?;
    check_keys(&doc, "", TOP_KEYS)?;
    let theta = required_real(&doc, "theta", "theta")?;
    let phi = required_real(&doc, "phi", "phi")?;
    WaySuperposition::new(theta, phi).map_err(model_error("theta"))?;
    let probe_grid = count(&doc, "probe_grid")?.unwrap_or(DEFAULT_PROBE_GRID as u64) as usize;
    if probe_grid < MIN_GRID {
        return Err(invalid(format!("probe_grid = {probe_grid} is below {MIN_GRID}")));
    }
    let shots = count(&doc, "shots")?.unwrap_or(0);
    let seed = count(&doc, "seed")?.unwrap_or(0);
    let shards = count(&doc, "shards")?.unwrap_or(1) as usize;
    if shards == 0 {
        return Err(invalid("shards must be at least 1"));
    }
    let output = match doc.get("output") {
        None => None,
        Some(Value::String(s)) => Some(PathBuf::from(s)),
        Some(_) => return Err(invalid("output must be a string")),
    };
    let channel = match doc.get("channel") {
        Some(Value::Table(t)) => parse_channel(t)?,
        Some(_) => return Err(invalid("channel must be a table")),
        None => return Err(invalid("a [channel] table is required")),
    };
    let sorting = match doc.get("erasure") {
        Some(Value::Table(t)) => Some(parse_sorting(t, &channel)?),
        Some(_) => return Err(invalid("erasure must be a table")),
        None => None,
    };
    Ok(Scenario {
        theta,
        phi,
        channel,
        sorting,
        probe_grid,
        shots,
        seed,
        shards,
        output,
    })
}

/// Reads and parses a scenario file. Paths in `output` stay as written.
pub fn read_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_scenario(&text)
}
