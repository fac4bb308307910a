//! `fekete-sphere <generate|analyze|mz|interp|study>`.
//!
//! Exit codes: 0 success, 1 error, 2 certificate warning, 64 usage,
//! 65 missing source degree, 66 unreadable input.

pub mod commands;
pub mod config;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use crate::geometry::MeshKind;
pub use config::{parse_degrees, Command, RunConfig};
pub use report::{Report, SCHEMA};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_WARNING: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_MISSING_DEGREE: i32 = 65;
pub const EXIT_NO_INPUT: i32 = 66;

pub const THREADS_ENV: &str = "FEKETE_SPHERE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "fekete-sphere", version, about = "Approximate Fekete points on S¹ and S² and their diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Compute Fekete point sets and write one file per degree.
    Generate(Flags),
    /// Separation, frame bounds, densities and cap counts of point files.
    Analyze(Flags),
    /// Frame bounds and endpoint MZ estimates for the dilated array Z_ε.
    Mz(Flags),
    /// Interpolation residuals and norm ratios on the array Z_{−ε}.
    Interp(Flags),
    /// Equidistribution, separation and Lebesgue-constant trends with CSV.
    Study(Flags),
}

#[derive(Debug, clap::Args)]
struct Flags {
    /// Sphere dimension (1 or 2).
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Degrees: `a..b` (inclusive) or a comma list.
    #[arg(long = "L", value_name = "DEGREES")]
    degrees: Option<String>,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    /// Density scales α (comma list).
    #[arg(long, default_value = "8")]
    alpha: String,
    /// Cap radius for equidistribution counts.
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Candidate mesh: fibonacci | grid | random[:seed].
    #[arg(long, default_value = "fibonacci")]
    mesh: String,
    #[arg(long)]
    mesh_size: Option<usize>,
    /// exchange | ascent | both
    #[arg(long, default_value = "both")]
    refinement: String,
    #[arg(long, default_value_t = 2000)]
    max_iterations: usize,
    #[arg(long, default_value_t = 1e-10)]
    stop_tol: f64,
    #[arg(long, default_value_t = 0.05)]
    cert_tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sampled cap centers.
    #[arg(long, default_value_t = 500)]
    samples: usize,
    /// Random polynomials per endpoint MZ estimate.
    #[arg(long, default_value_t = 200)]
    trials: usize,
    /// Point files or directories of point files.
    #[arg(long, num_args = 1..)]
    points: Vec<PathBuf>,
    /// Output directory (reports go to stdout when absent, except for
    /// generate which defaults to the current directory).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn build_config(command: Command, f: Flags) -> Result<RunConfig> {
    let degrees = match &f.degrees {
        Some(s) => parse_degrees(s)?,
        None => Vec::new(),
    };
    let mesh = match f.mesh.parse()? {
        MeshKind::Random { .. } if f.mesh == "random" => MeshKind::Random { seed: f.seed },
        other => other,
    };
    let config = RunConfig {
        command,
        d: f.d,
        degrees,
        eps: f.eps,
        alpha: config::parse_reals(&f.alpha)?,
        radius: f.radius,
        mesh,
        mesh_size: f.mesh_size,
        refinement: f.refinement.parse()?,
        max_iterations: f.max_iterations,
        stop_tol: f.stop_tol,
        cert_tol: f.cert_tol,
        seed: f.seed,
        samples: f.samples,
        trials: f.trials,
        points: f.points,
        out: f.out,
    };
    config.validate()?;
    Ok(config)
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidArgument(_) | Error::UnsupportedDimension(_) => EXIT_USAGE,
        Error::MissingDegree(_) => EXIT_MISSING_DEGREE,
        Error::Io { .. } | Error::Parse { .. } => EXIT_NO_INPUT,
        _ => EXIT_ERROR,
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            // Fails only if a pool already exists, which is harmless.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    let (command, flags) = match cli.command {
        Sub::Generate(f) => (Command::Generate, f),
        Sub::Analyze(f) => (Command::Analyze, f),
        Sub::Mz(f) => (Command::Mz, f),
        Sub::Interp(f) => (Command::Interp, f),
        Sub::Study(f) => (Command::Study, f),
    };
    let result = build_config(command, flags).and_then(|config| commands::execute(&config));
    match result {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            if outcome.warnings.is_empty() {
                EXIT_OK
            } else {
                EXIT_WARNING
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
