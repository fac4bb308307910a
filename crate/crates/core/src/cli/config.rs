use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::MeshKind;
use crate::solver::{FeketeConfig, Refinement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Generate,
    Analyze,
    Mz,
    Interp,
    Study,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Generate => "generate",
            Command::Analyze => "analyze",
            Command::Mz => "mz",
            Command::Interp => "interp",
            Command::Study => "study",
        }
    }
}

/// Everything a run depends on besides its input files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub d: usize,
    pub degrees: Vec<usize>,
    pub eps: f64,
    pub alpha: Vec<f64>,
    pub radius: f64,
    pub mesh: MeshKind,
    pub mesh_size: Option<usize>,
    pub refinement: Refinement,
    pub max_iterations: usize,
    pub stop_tol: f64,
    pub cert_tol: f64,
    pub seed: u64,
    pub samples: usize,
    pub trials: usize,
    pub points: Vec<PathBuf>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn solver(&self) -> FeketeConfig {
        FeketeConfig {
            mesh_kind: self.mesh,
            mesh_size: self.mesh_size,
            refinement: self.refinement,
            max_iterations: self.max_iterations,
            stop_tol: self.stop_tol,
            seed: self.seed,
            cert_tol: self.cert_tol,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !matches!(self.d, 1 | 2) {
            return Err(Error::invalid(format!("--d {} is not supported (1 or 2)", self.d)));
        }
        let needs_degrees = !matches!(self.command, Command::Analyze);
        if needs_degrees && self.degrees.is_empty() {
            return Err(Error::invalid("--L must list at least one degree"));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::invalid(format!("--eps {} must be positive", self.eps)));
        }
        if self.command == Command::Interp && self.eps > 1.0 {
            return Err(Error::invalid("--eps must not exceed 1 for interp"));
        }
        if self.alpha.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return Err(Error::invalid("--alpha values must be positive"));
        }
        if !(self.radius > 0.0 && self.radius <= std::f64::consts::PI) {
            return Err(Error::invalid(format!("--radius {} must lie in (0, π]", self.radius)));
        }
        if !(self.stop_tol > 0.0) {
            return Err(Error::invalid("--stop-tol must be positive"));
        }
        if self.samples == 0 || self.trials == 0 {
            return Err(Error::invalid("--samples and --trials must be positive"));
        }
        Ok(())
    }
}

/// Degree lists: `a..b` (inclusive), `a,b,c`, or a mix such as `1..3,8`.
pub fn parse_degrees(s: &str) -> Result<Vec<usize>> {
    let bad = |part: &str| Error::invalid(format!("bad degree list entry {part:?} in {s:?}"));
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        if part.is_empty() {
            return Err(bad(part));
        }
        match part.split_once("..") {
            Some((a, b)) => {
                let a: usize = a.trim().parse().map_err(|_| bad(part))?;
                let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad(part))?;
                if b < a {
                    return Err(bad(part));
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad(part))?),
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

pub fn parse_reals(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::invalid(format!("bad number {p:?} in {s:?}")))
        })
        .collect()
}
