use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use kickback::eraser::{classical_sort_control, eigen_erasure_basis, erasure_report, EnvBasis};
use kickback::fock::{verify, ResolutionParams};
use kickback::qcore::WaySuperposition;
use kickback::report::Report;
use kickback::sai::{certify_equivalence_at, CertGrid, Description, CERT_TOL};
use kickback::scenario::{read_scenario, simulate, BasisSpec, ScenarioError, Sorting, DEFAULT_TAGS};

/// Mixture deviation allowed by `erase` before it reports failure.
const MIXTURE_TOL: f64 = 1e-10;

/// Shots for the classical control when the scenario sets none.
const CONTROL_SHOTS: u64 = 100_000;

#[derive(Parser)]
#[command(name = "kickback", version, about = "Phase-kick and which-way dephasing channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fringe data as CSV plus a report; sampled when shots > 0.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// CSV destination; overrides `output` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certifies the channel against its description in the other picture.
    Equivalence {
        #[arg(long)]
        config: PathBuf,
    },
    /// Sorts runs by an environment measurement, or by random tags for kick
    /// channels.
    Erase {
        #[arg(long)]
        config: PathBuf,
    },
    /// Coherent-state resolution of the identity and detector overlaps.
    FockVerify {
        #[arg(long, default_value_t = ResolutionParams::default().n_sub)]
        n_sub: usize,
        #[arg(long, default_value_t = ResolutionParams::default().n_max)]
        n_max: usize,
        #[arg(long, default_value_t = ResolutionParams::default().i_max)]
        i_max: f64,
        #[arg(long, default_value_t = ResolutionParams::default().n_phi)]
        n_phi: usize,
        #[arg(long, default_value_t = ResolutionParams::default().n_i)]
        n_i: usize,
    },
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> ScenarioError + '_ {
    move |source| ScenarioError::Io {
        path: path.to_owned(),
        source,
    }
}

fn tolerance() -> Result<f64, ScenarioError> {
    match std::env::var("KICKBACK_TOL") {
        Err(_) => Ok(CERT_TOL),
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
            _ => Err(ScenarioError::Invalid(format!(
                "KICKBACK_TOL = {s:?} is not a positive number"
            ))),
        },
    }
}

fn print(report: &Report) {
    print!("{report}");
}

fn run(cli: Cli) -> Result<bool, ScenarioError> {
    match cli.command {
        Command::Simulate {
            config,
            shots,
            seed,
            out,
        } => {
            let mut s = read_scenario(&config)?;
            if let Some(n) = shots {
                s.shots = n;
            }
            if let Some(seed) = seed {
                s.seed = seed;
            }
            let outcome = simulate(&s)?;
            match out.or(s.output.clone()) {
                Some(path) => {
                    std::fs::write(&path, &outcome.csv).map_err(io_error(&path))?;
                    print(&outcome.report);
                }
                None => {
                    std::io::stdout()
                        .write_all(outcome.csv.as_bytes())
                        .map_err(io_error(Path::new("<stdout>")))?;
                    eprint!("{}", outcome.report);
                }
            }
            Ok(outcome.pass)
        }
        Command::Equivalence { config } => {
            let s = read_scenario(&config)?;
            let tol = tolerance()?;
            let other = s.channel.converted()?;
            let cert = certify_equivalence_at(&s.channel, &other, &CertGrid::default(), tol)?;
            print(&cert.report());
            Ok(cert.pass)
        }
        Command::Erase { config } => {
            let s = read_scenario(&config)?;
            let psi = WaySuperposition::new(s.theta, s.phi)?;
            match &s.channel {
                Description::Environment(m) => {
                    let basis = match &s.sorting {
                        None | Some(Sorting::Basis(BasisSpec::Eigen)) => eigen_erasure_basis(m)?,
                        Some(Sorting::Basis(BasisSpec::Computational)) => EnvBasis::computational(m.dim()),
                        Some(Sorting::Basis(BasisSpec::Explicit(v))) => EnvBasis::new(v.clone())?,
                        Some(Sorting::Tags(_)) => unreachable!("tags are rejected for environment channels"),
                    };
                    let r = erasure_report(&psi, m, &basis)?;
                    let pass = r.mixture_deviation < MIXTURE_TOL;
                    print(&r.report());
                    Ok(pass)
                }
                Description::Kicks(w) => {
                    let tags = match s.sorting {
                        Some(Sorting::Tags(n)) => n,
                        _ => DEFAULT_TAGS,
                    };
                    let shots = if s.shots > 0 { s.shots } else { CONTROL_SHOTS };
                    let r = classical_sort_control(&psi, w, tags, shots, s.seed)?;
                    print(&r.report());
                    Ok(r.pass)
                }
            }
        }
        Command::FockVerify {
            n_sub,
            n_max,
            i_max,
            n_phi,
            n_i,
        } => {
            let params = ResolutionParams {
                n_sub,
                n_max,
                i_max,
                n_phi,
                n_i,
            };
            let v = verify(&params)?;
            print(&v.report());
            Ok(v.pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
