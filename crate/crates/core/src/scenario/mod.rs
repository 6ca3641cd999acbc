//! Configured experiments: a TOML document names the preparation, the
//! channel and an optional sorting of the runs, and is run either exactly or
//! by sampling detections.
//!
//! ```toml
//! theta = 1.5707963267948966
//! phi = 0.0
//! probe_grid = 64      # optional, ≥ 8
//! shots = 100000       # optional, 0 = analytic only
//! seed = 7             # optional
//! shards = 4           # optional, worker threads for sampling
//! output = "out.csv"   # optional
//!
//! [channel]
//! kind = "canonical"   # atoms | window | grid | sew | canonical | explicit
//! eps_modulus = 0.6
//! delta = 0.0
//!
//! [erasure]
//! basis = "eigen"      # eigen | computational | explicit (environment channels)
//! ```
//!
//! Channel fields by kind:
//!
//! | kind        | fields                                     |
//! |-------------|--------------------------------------------|
//! | `atoms`     | `phases`, `weights`                        |
//! | `window`    | `half_width`, `center` (default 0)         |
//! | `grid`      | `density` (samples at −π + 2π(j+1)/N)      |
//! | `sew`       | `lambda_t`                                 |
//! | `canonical` | `eps_modulus`, `delta` (default 0)         |
//! | `explicit`  | `rho_env`, `u_env`                         |
//!
//! `rho_env`, `u_env` and each entry of `erasure.vectors` are row-major lists
//! of `[re, im]` pairs. Kick channels take `erasure.tags = n` instead of a
//! basis: every run gets an independent uniform tag in `0..n`.

mod config;
mod run;

use std::path::PathBuf;

use crate::qcore::CVector;
use crate::sai::Description;

pub use config::{parse_scenario, read_scenario};
pub use run::{run_analytic, run_monte_carlo, simulate, Outcome, CSV_HEADER};

/// Default number of probe phases.
pub const DEFAULT_PROBE_GRID: usize = 64;

/// Default tag count for kick channels in `erase`.
pub const DEFAULT_TAGS: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub enum BasisSpec {
    Eigen,
    Computational,
    Explicit(Vec<CVector>),
}

/// How runs are sorted into subensembles.
#[derive(Debug, Clone, PartialEq)]
pub enum Sorting {
    /// Measure the environment in a basis.
    Basis(BasisSpec),
    /// Attach independent uniform tags (kick channels).
    Tags(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub theta: f64,
    pub phi: f64,
    pub channel: Description,
    pub sorting: Option<Sorting>,
    pub probe_grid: usize,
    pub shots: u64,
    pub seed: u64,
    pub shards: usize,
    pub output: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] crate::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl ScenarioError {
    /// 1 for failed numerical checks, 2 for everything the input is to blame
    /// for.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Model(crate::Error::CheckFailed(_)) => 1,
            _ => 2,
        }
    }
}
