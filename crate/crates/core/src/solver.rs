//! Approximate Fekete points: maximize log|det V| where V is the π_L × π_L
//! matrix of basis values at the nodes.
//!
//! The pipeline is a greedy volume-maximizing subset selection on a
//! candidate mesh (column-pivoted Gram–Schmidt), followed by refinement:
//!
//! * exchange: moving node j to a point c multiplies |det V| by |ℓ_j(c)|,
//!   the j-th cardinal function at c, so the best single-point move is the
//!   largest entry of V⁻¹ Y over candidate columns Y. Accepted moves update
//!   V⁻¹ with Sherman–Morrison.
//! * ascent: the gradient of log|det V| with respect to node j is ∇ℓ_j(z_j);
//!   all nodes move together along it with a backtracking step.
//!
//! Every accepted step raises log|det V| by at least `stop_tol`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::separation;
use crate::error::{Error, Result};
use crate::geometry::{generate_mesh, MeshKind, PointSet, SpherePoint};
use crate::harmonics::{
    basis_eval, basis_gradient_ambient, basis_matrix, fill_basis, local_maximize, sup_mesh_size,
    tangent_frame, PolySpace,
};

/// Relative singular-value threshold below which a Vandermonde matrix is
/// treated as rank deficient.
pub const RANK_RTOL: f64 = 1e-12;

/// The π_L × m matrix of basis values at a point set.
#[derive(Debug, Clone)]
pub struct VandermondeSystem {
    space: PolySpace,
    points: PointSet,
    matrix: DMatrix<f64>,
    rank: usize,
    logabsdet: Option<f64>,
}

impl VandermondeSystem {
    pub fn space(&self) -> &PolySpace {
        &self.space
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// log|det V| for square systems; −∞ when singular.
    pub fn logabsdet(&self) -> Option<f64> {
        self.logabsdet
    }

    pub fn is_square(&self) -> bool {
        self.matrix.nrows() == self.matrix.ncols()
    }
}

pub fn vandermonde(space: &PolySpace, points: &PointSet) -> Result<VandermondeSystem> {
    let matrix = basis_matrix(space, points)?;
    let (n, m) = matrix.shape();
    let (rank, logabsdet) = if n == 0 || m == 0 {
        (0, (n == m).then_some(0.0))
    } else {
        let sv = matrix.clone().svd(false, false).singular_values;
        let max = sv.max();
        let rank = sv.iter().filter(|&&s| s > RANK_RTOL * max).count();
        let logdet = (n == m).then(|| {
            if rank < n {
                f64::NEG_INFINITY
            } else {
                sv.iter().map(|s| s.ln()).sum()
            }
        });
        (rank, logdet)
    };
    Ok(VandermondeSystem {
        space: *space,
        points: points.clone(),
        matrix,
        rank,
        logabsdet,
    })
}

/// log|det| and inverse of a square matrix via partial-pivot LU.
fn lu_logdet_inverse(v: &DMatrix<f64>) -> Option<(f64, DMatrix<f64>)> {
    let lu = v.clone().lu();
    let u = lu.u();
    let mut logdet = 0.0;
    for i in 0..u.nrows() {
        let d = u[(i, i)].abs();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        logdet += d.ln();
    }
    let inv = lu.try_inverse()?;
    Some((logdet, inv))
}

/// Greedy volume-maximizing selection of π_L mesh points.
///
/// Step k picks the column of maximal residual norm after projecting out
/// the span of the k columns already chosen; ties go to the lowest index.
pub fn greedy_select(space: &PolySpace, mesh: &PointSet) -> Result<PointSet> {
    let n = space.dim();
    if mesh.len() < n {
        return Err(Error::TooFewPoints {
            need: n,
            got: mesh.len(),
        });
    }
    let y = basis_matrix(space, mesh)?;
    let mut residual: Vec<f64> = y.as_slice().to_vec();
    let mut norms: Vec<f64> = residual.par_chunks(n).map(|c| dot(c, c)).collect();
    let mut chosen = Vec::with_capacity(n);
    let mut scale = 0.0;
    for step in 0..n {
        let (best, best_norm) = norms
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
        if step == 0 {
            scale = best_norm.sqrt();
        }
        if !(best_norm.sqrt() > 1e-10 * scale) {
            return Err(Error::RankDeficient { rank: step, needed: n });
        }
        let inv_norm = 1.0 / best_norm.sqrt();
        let q: Vec<f64> = residual[best * n..(best + 1) * n].iter().map(|v| v * inv_norm).collect();
        chosen.push(best);
        residual
            .par_chunks_mut(n)
            .zip(norms.par_iter_mut())
            .for_each(|(col, norm)| {
                let c = dot(&q, col);
                col.iter_mut().zip(&q).for_each(|(r, qi)| *r -= c * qi);
                *norm = dot(col, col);
            });
        norms[best] = f64::NEG_INFINITY;
    }
    let points = chosen.iter().map(|&i| mesh.points()[i].clone()).collect();
    PointSet::new(space.d(), points)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Refinement {
    Exchange,
    Ascent,
    Both,
}

impl std::str::FromStr for Refinement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exchange" => Ok(Refinement::Exchange),
            "ascent" => Ok(Refinement::Ascent),
            "both" => Ok(Refinement::Both),
            other => Err(Error::invalid(format!("unknown refinement {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeketeConfig {
    pub mesh_kind: MeshKind,
    /// Candidate mesh size; defaults to max(50·π_L, 2000).
    pub mesh_size: Option<usize>,
    pub refinement: Refinement,
    /// Cap on accepted refinement moves (exchanges plus ascent steps).
    pub max_iterations: usize,
    /// Minimal log|det| gain for a move to count as an improvement.
    pub stop_tol: f64,
    pub seed: u64,
    /// Certificate tolerance τ: sup|ℓ_i| ≤ 1 + τ.
    pub cert_tol: f64,
}

impl Default for FeketeConfig {
    fn default() -> Self {
        Self {
            mesh_kind: MeshKind::Fibonacci,
            mesh_size: None,
            refinement: Refinement::Both,
            max_iterations: 2000,
            stop_tol: 1e-10,
            seed: 0,
            cert_tol: 0.05,
        }
    }
}

impl FeketeConfig {
    pub fn mesh_size_for(&self, space: &PolySpace) -> usize {
        self.mesh_size.unwrap_or((50 * space.dim()).max(2000))
    }

    pub fn validate(&self, space: &PolySpace) -> Result<()> {
        if !(self.stop_tol > 0.0) {
            return Err(Error::invalid("stop_tol must be positive"));
        }
        if !(self.cert_tol >= 0.0) {
            return Err(Error::invalid("cert_tol must be non-negative"));
        }
        let size = self.mesh_size_for(space);
        if size < 4 * space.dim() {
            return Err(Error::invalid(format!(
                "mesh size {size} is below 4·π_L = {}",
                4 * space.dim()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefineLog {
    /// log|det| after every accepted move, starting with the input value.
    pub trace: Vec<f64>,
    pub exchanges: usize,
    pub ascent_steps: usize,
    /// True when `max_iterations` stopped the refinement.
    pub capped: bool,
}

impl RefineLog {
    pub fn iterations(&self) -> usize {
        self.exchanges + self.ascent_steps
    }
}

/// Mutable refinement state: nodes, V⁻¹ and log|det V|.
struct Nodes<'a> {
    space: &'a PolySpace,
    points: Vec<SpherePoint>,
    inv: DMatrix<f64>,
    logdet: f64,
}

impl<'a> Nodes<'a> {
    fn new(space: &'a PolySpace, points: Vec<SpherePoint>) -> Result<Self> {
        let set = PointSet::with_duplicates(space.d(), points)?;
        let v = basis_matrix(space, &set)?;
        let (logdet, inv) = lu_logdet_inverse(&v).ok_or(Error::Singular)?;
        Ok(Self {
            space,
            points: set.into_points(),
            inv,
            logdet,
        })
    }

    fn refresh(&mut self) -> Result<()> {
        let fresh = Nodes::new(self.space, self.points.clone())?;
        self.inv = fresh.inv;
        self.logdet = fresh.logdet;
        Ok(())
    }

    fn basis(&self, z: &SpherePoint) -> DVector<f64> {
        let mut y = DVector::zeros(self.space.dim());
        fill_basis(self.space, z, y.as_mut_slice());
        y
    }

    /// ℓ_j(z) = (V⁻¹ y(z))_j.
    fn cardinal(&self, j: usize, z: &SpherePoint) -> f64 {
        self.inv.row(j).dot(&self.basis(z).transpose())
    }

    /// Replaces node j by `z`, where `u = V⁻¹ y(z)`. Returns the gain.
    fn exchange(&mut self, j: usize, z: SpherePoint, u: &DVector<f64>, cols: Option<&mut DMatrix<f64>>) -> f64 {
        let uj = u[j];
        let mut w = u.clone();
        w[j] -= 1.0;
        w /= uj;
        let row = self.inv.row(j).clone_owned();
        self.inv -= &w * row;
        if let Some(cols) = cols {
            let crow = cols.row(j).clone_owned();
            *cols -= &w * crow;
        }
        self.points[j] = z;
        let gain = uj.abs().ln();
        self.logdet += gain;
        gain
    }

    /// Riemannian gradient of log|det V| at every node (ambient vectors).
    fn gradients(&self) -> Result<Vec<Vec<f64>>> {
        self.points
            .par_iter()
            .enumerate()
            .map(|(j, z)| {
                let g = basis_gradient_ambient(self.space, z)?;
                let row = self.inv.row(j);
                Ok((0..g.ncols()).map(|a| row.dot(&g.column(a).transpose())).collect())
            })
            .collect()
    }
}

/// Local candidates: rings of radius (2/L)·{¼, ½, ¾, 1} around `z`.
fn local_candidates(z: &SpherePoint, degree: usize) -> Vec<SpherePoint> {
    let radius = 2.0 / degree.max(1) as f64;
    let frame = tangent_frame(z).expect("evaluable dimension");
    let c = z.coords();
    let mut out = Vec::new();
    for k in 1..=4 {
        let r = radius * k as f64 / 4.0;
        let (sr, cr) = r.sin_cos();
        let directions: Vec<Vec<f64>> = if frame.len() == 1 {
            vec![frame[0].clone(), frame[0].iter().map(|v| -v).collect()]
        } else {
            (0..8)
                .map(|i| {
                    let a = PI * i as f64 / 4.0 + 0.3 * k as f64;
                    (0..3).map(|t| a.cos() * frame[0][t] + a.sin() * frame[1][t]).collect()
                })
                .collect()
        };
        for dir in directions {
            let p: Vec<f64> = c.iter().zip(&dir).map(|(a, b)| cr * a + sr * b).collect();
            out.push(SpherePoint::new(p).expect("nonzero"));
        }
    }
    out
}

/// One exchange sweep against `mesh` plus local candidates. Returns the
/// number of accepted moves.
fn exchange_sweep(
    nodes: &mut Nodes<'_>,
    mesh: &[SpherePoint],
    mesh_basis: Option<&DMatrix<f64>>,
    config: &FeketeConfig,
    log: &mut RefineLog,
) -> Result<usize> {
    let space = nodes.space;
    let n = space.dim();
    let mut candidates: Vec<SpherePoint> = nodes
        .points
        .par_iter()
        .flat_map_iter(|z| local_candidates(z, space.degree()))
        .collect();
    let local = PointSet::with_duplicates(space.d(), candidates.clone())?;
    let mut y = basis_matrix(space, &local)?;
    if let Some(mb) = mesh_basis {
        candidates.extend_from_slice(mesh);
        y = DMatrix::from_fn(n, y.ncols() + mb.ncols(), |i, k| {
            if k < y.ncols() {
                y[(i, k)]
            } else {
                mb[(i, k - y.ncols())]
            }
        });
    }
    let mut w = &nodes.inv * &y;
    let mut accepted = 0;
    let budget = n.max(8);
    while accepted < budget && log.iterations() < config.max_iterations {
        let (mut best_j, mut best_c, mut best_v) = (0, 0, 0.0f64);
        for c in 0..w.ncols() {
            for j in 0..n {
                let v = w[(j, c)].abs();
                if v > best_v {
                    best_v = v;
                    best_j = j;
                    best_c = c;
                }
            }
        }
        if !(best_v.ln() >= config.stop_tol) {
            break;
        }
        // Polish the target to a local maximizer of |ℓ_j|.
        let j = best_j;
        let (target, value) = local_maximize(
            &candidates[best_c],
            best_v,
            0.25 / space.degree().max(1) as f64,
            |z| nodes.cardinal(j, z).abs(),
        )?;
        let u = &nodes.inv * nodes.basis(&target);
        debug_assert!((u[j].abs() - value).abs() < 1e-8 * value);
        let gain = nodes.exchange(j, target.clone(), &u, Some(&mut w));
        // The polished target is not a candidate column; keep W honest for
        // the original candidate set only.
        log.trace.push(nodes.logdet);
        log.exchanges += 1;
        accepted += 1;
        debug_assert!(gain >= config.stop_tol);
    }
    if accepted > 0 {
        nodes.refresh()?;
        if let Some(last) = log.trace.last_mut() {
            *last = nodes.logdet;
        }
    }
    Ok(accepted)
}

/// Gradient ascent with backtracking. Returns the number of accepted steps.
fn ascent(nodes: &mut Nodes<'_>, config: &FeketeConfig, log: &mut RefineLog, max_steps: usize) -> Result<usize> {
    let space = nodes.space;
    let degree = space.degree().max(1) as f64;
    let mut step = 0.1 / (degree * degree);
    let mut taken = 0;
    while taken < max_steps && log.iterations() < config.max_iterations {
        let grads = nodes.gradients()?;
        let gmax = grads
            .iter()
            .map(|g| g.iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        if gmax == 0.0 {
            break;
        }
        // Never move a node by more than a fraction of the node spacing.
        step = step.min(0.25 / (degree * gmax));
        let mut accepted = None;
        for _ in 0..40 {
            let moved: Vec<SpherePoint> = nodes
                .points
                .iter()
                .zip(&grads)
                .map(|(z, g)| z.retract(&g.iter().map(|v| v * step).collect::<Vec<_>>()))
                .collect();
            if let Ok(trial) = Nodes::new(space, moved) {
                if trial.logdet - nodes.logdet >= config.stop_tol {
                    accepted = Some(trial);
                    break;
                }
            }
            step *= 0.5;
            if step * gmax < 1e-14 {
                break;
            }
        }
        match accepted {
            Some(trial) => {
                nodes.points = trial.points;
                nodes.inv = trial.inv;
                nodes.logdet = trial.logdet;
                log.trace.push(nodes.logdet);
                log.ascent_steps += 1;
                taken += 1;
                step *= 2.0;
            }
            None => break,
        }
    }
    Ok(taken)
}

/// Locally maximizes log|det V| starting from a square nonsingular set.
pub fn refine_exchange(space: &PolySpace, points: &PointSet, config: &FeketeConfig) -> Result<(PointSet, RefineLog)> {
    refine_with_mesh(space, points, config, None)
}

fn refine_with_mesh(
    space: &PolySpace,
    points: &PointSet,
    config: &FeketeConfig,
    mesh: Option<&PointSet>,
) -> Result<(PointSet, RefineLog)> {
    config.validate(space)?;
    if points.len() != space.dim() {
        return Err(Error::invalid(format!(
            "refinement needs exactly π_L = {} points, got {}",
            space.dim(),
            points.len()
        )));
    }
    let mut nodes = Nodes::new(space, points.points().to_vec())?;
    let mesh_basis = match mesh {
        Some(m) => Some(basis_matrix(space, m)?),
        None => None,
    };
    let mesh_points = mesh.map(|m| m.points()).unwrap_or(&[]);
    let mut log = RefineLog {
        trace: vec![nodes.logdet],
        exchanges: 0,
        ascent_steps: 0,
        capped: false,
    };
    let use_exchange = matches!(config.refinement, Refinement::Exchange | Refinement::Both);
    let use_ascent = matches!(config.refinement, Refinement::Ascent | Refinement::Both);
    loop {
        let mut moves = 0;
        if use_exchange {
            moves += exchange_sweep(&mut nodes, mesh_points, mesh_basis.as_ref(), config, &mut log)?;
        }
        if use_ascent {
            moves += ascent(&mut nodes, config, &mut log, 200)?;
        }
        if log.iterations() >= config.max_iterations {
            log.capped = moves > 0;
            break;
        }
        if moves == 0 {
            break;
        }
    }
    let label = points.label().map(str::to_owned);
    let mut set = PointSet::new(space.d(), nodes.points)?;
    if let Some(label) = label {
        set = set.with_label(label);
    }
    Ok((set, log))
}

/// max_i sup_z |ℓ_i(z)| over a dense mesh with local refinement, together
/// with the per-node maximizers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub value: f64,
    pub per_node: Vec<f64>,
    pub mesh_size: usize,
    #[serde(skip)]
    maximizers: Vec<SpherePoint>,
}

pub fn cardinal_certificate(space: &PolySpace, points: &PointSet) -> Result<Certificate> {
    let nodes = Nodes::new(space, points.points().to_vec())?;
    let mesh = generate_mesh(space.d(), sup_mesh_size(space.d(), space.degree()), MeshKind::Fibonacci)?;
    let w = &nodes.inv * basis_matrix(space, &mesh)?;
    let h = 0.5 / space.degree().max(1) as f64;
    let results: Vec<(f64, SpherePoint)> = (0..space.dim())
        .into_par_iter()
        .map(|i| {
            // Start from the better of the node itself and the best mesh point.
            let (mut c_best, mut v_best) = (None, 1.0f64);
            for c in 0..w.ncols() {
                let v = w[(i, c)].abs();
                if v > v_best {
                    v_best = v;
                    c_best = Some(c);
                }
            }
            let start = c_best.map_or_else(|| nodes.points[i].clone(), |c| mesh.points()[c].clone());
            let start_v = nodes.cardinal(i, &start).abs().max(if c_best.is_none() { 1.0 } else { 0.0 });
            let (z, v) = local_maximize(&start, start_v, h, |z| nodes.cardinal(i, z).abs())?;
            Ok((v, z))
        })
        .collect::<Result<_>>()?;
    let per_node: Vec<f64> = results.iter().map(|r| r.0).collect();
    Ok(Certificate {
        value: per_node.iter().cloned().fold(0.0, f64::max),
        per_node,
        mesh_size: mesh.len(),
        maximizers: results.into_iter().map(|r| r.1).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshDescriptor {
    pub kind: MeshKind,
    pub size: usize,
}

/// Per-degree record of a Fekete solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveLog {
    pub d: usize,
    pub degree: usize,
    pub dim: usize,
    pub mesh: MeshDescriptor,
    pub seed: u64,
    pub refinement: Refinement,
    pub iterations: usize,
    pub exchanges: usize,
    pub ascent_steps: usize,
    pub capped: bool,
    pub initial_logabsdet: f64,
    pub final_logabsdet: f64,
    pub logabsdet_trace: Vec<f64>,
    pub certificate: f64,
    pub certificate_mesh: usize,
    pub cert_tol: f64,
    pub certificate_ok: bool,
    /// Minimal pairwise geodesic distance (absent for a single node).
    pub separation: Option<f64>,
    /// separation / (π / 2L), absent for L = 0.
    pub separation_ratio: Option<f64>,
}

impl SolveLog {
    pub fn warning(&self) -> bool {
        !self.certificate_ok || self.capped
    }
}

#[derive(Debug, Clone)]
pub struct FeketeSolution {
    pub points: PointSet,
    pub log: SolveLog,
}

/// Greedy selection on the candidate mesh followed by refinement and the
/// cardinal-function certificate. Failing the certificate is not an error:
/// the set is returned with `log.certificate_ok = false`.
pub fn fekete_points(space: &PolySpace, config: &FeketeConfig) -> Result<FeketeSolution> {
    space.require_evaluable()?;
    config.validate(space)?;
    let mesh_size = config.mesh_size_for(space);
    let mesh = generate_mesh(space.d(), mesh_size, config.mesh_kind)?;
    let start = greedy_select(space, &mesh)?;
    let (mut points, mut log) = refine_with_mesh(space, &start, config, Some(&mesh))?;
    let initial = log.trace[0];
    let mut cert = cardinal_certificate(space, &points)?;
    // Certificate maximizers above 1 are improving exchanges; feed them back.
    let mut rounds = 0;
    while config.refinement != Refinement::Ascent
        && cert.value > 1.0 + 1e-6
        && rounds < 4
        && log.iterations() < config.max_iterations
    {
        rounds += 1;
        let extra = PointSet::with_duplicates(space.d(), cert.maximizers.clone())?;
        let mut cfg = config.clone();
        cfg.max_iterations = config.max_iterations - log.iterations();
        let (p, more) = refine_with_mesh(space, &points, &cfg, Some(&extra))?;
        if more.iterations() == 0 {
            break;
        }
        log.trace.extend_from_slice(&more.trace[1..]);
        log.exchanges += more.exchanges;
        log.ascent_steps += more.ascent_steps;
        log.capped = more.capped;
        points = p;
        cert = cardinal_certificate(space, &points)?;
    }
    let degree = space.degree();
    let sep = if points.len() >= 2 { Some(separation(&points)?) } else { None };
    let points = points.with_label(format!("fekete L={} d={}", degree, space.d()));
    let log = SolveLog {
        d: space.d(),
        degree,
        dim: space.dim(),
        mesh: MeshDescriptor {
            kind: config.mesh_kind,
            size: mesh_size,
        },
        seed: config.seed,
        refinement: config.refinement,
        iterations: log.iterations(),
        exchanges: log.exchanges,
        ascent_steps: log.ascent_steps,
        capped: log.capped,
        initial_logabsdet: initial,
        final_logabsdet: *log.trace.last().expect("non-empty trace"),
        logabsdet_trace: log.trace,
        certificate: cert.value,
        certificate_mesh: cert.mesh_size,
        cert_tol: config.cert_tol,
        certificate_ok: cert.value <= 1.0 + config.cert_tol,
        separation: sep,
        separation_ratio: match (sep, degree) {
            (Some(s), l) if l > 0 => Some(s / (PI / (2.0 * l as f64))),
            _ => None,
        },
    };
    Ok(FeketeSolution { points, log })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// Z_ε(L) = Z(⌊(1+ε)L⌋), the sampling (MZ) side.
    Up,
    /// Z_{−ε}(L) = Z(⌊(1−ε)L⌋), the interpolation side.
    Down,
}

/// ⌊(1±ε)L⌋, with a 1e-9 guard so decimal ε such as 0.4 floor as intended.
pub fn dilated_degree(degree: usize, eps: f64, direction: Direction) -> Result<usize> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::invalid(format!("ε = {eps} must be positive")));
    }
    let l = degree as f64;
    match direction {
        Direction::Up => Ok(((1.0 + eps) * l + 1e-9).floor() as usize),
        Direction::Down => {
            if eps > 1.0 {
                return Err(Error::invalid(format!("ε = {eps} exceeds 1 for the downward dilation")));
            }
            Ok(((1.0 - eps) * l + 1e-9).floor().max(0.0) as usize)
        }
    }
}

/// Per-degree point families Z(L).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangularArray {
    d: usize,
    sets: BTreeMap<usize, PointSet>,
    origin: String,
}

impl TriangularArray {
    pub fn new(d: usize, origin: impl Into<String>) -> Self {
        Self {
            d,
            sets: BTreeMap::new(),
            origin: origin.into(),
        }
    }

    pub fn insert(&mut self, degree: usize, set: PointSet) -> Result<()> {
        if set.dim() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: set.dim(),
            });
        }
        self.sets.insert(degree, set);
        Ok(())
    }

    pub fn get(&self, degree: usize) -> Option<&PointSet> {
        self.sets.get(&degree)
    }

    pub fn require(&self, degree: usize) -> Result<&PointSet> {
        self.get(degree).ok_or_else(|| Error::MissingDegree(vec![degree]))
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.sets.keys().copied()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn origin(&self) -> &str {
        &self.origin
    }

    /// Solves for every requested degree (in parallel across degrees).
    pub fn fekete(d: usize, degrees: &[usize], config: &FeketeConfig) -> Result<(Self, Vec<SolveLog>)> {
        let solved: Vec<(usize, FeketeSolution)> = degrees
            .par_iter()
            .map(|&l| Ok((l, fekete_points(&PolySpace::new(d, l)?, config)?)))
            .collect::<Result<_>>()?;
        let mut array = Self::new(d, format!("fekete solver {}", serde_json::to_string(config)?));
        let mut logs = Vec::with_capacity(solved.len());
        for (l, sol) in solved {
            array.insert(l, sol.points)?;
            logs.push(sol.log);
        }
        Ok((array, logs))
    }
}

/// Re-indexes `array` so that entry L holds Z(⌊(1±ε)L⌋).
pub fn dilate_array(array: &TriangularArray, eps: f64, direction: Direction, degrees: &[usize]) -> Result<TriangularArray> {
    let mut out = TriangularArray::new(
        array.d,
        format!("dilate {direction:?} eps={eps} of [{}]", array.origin),
    );
    let mut missing = Vec::new();
    for &l in degrees {
        let src = dilated_degree(l, eps, direction)?;
        match array.get(src) {
            Some(set) => out.insert(l, set.clone())?,
            None => missing.push(src),
        }
    }
    if missing.is_empty() {
        Ok(out)
    } else {
        missing.sort_unstable();
        missing.dedup();
        Err(Error::MissingDegree(missing))
    }
}

/// Evaluates the j-th cardinal function of the nodes at `z` (test helper
/// and cross-check for the interpolation module).
pub fn cardinal_value(space: &PolySpace, nodes: &PointSet, j: usize, z: &SpherePoint) -> Result<f64> {
    let v = basis_matrix(space, nodes)?;
    let y = DVector::from_vec(basis_eval(space, z)?);
    let u = v.lu().solve(&y).ok_or(Error::Singular)?;
    Ok(u[j])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tetrahedron() -> PointSet {
        let s = 1.0 / 3f64.sqrt();
        PointSet::new(
            2,
            vec![
                SpherePoint::new(vec![s, s, s]).unwrap(),
                SpherePoint::new(vec![s, -s, -s]).unwrap(),
                SpherePoint::new(vec![-s, s, -s]).unwrap(),
                SpherePoint::new(vec![-s, -s, s]).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn vandermonde_basic_cases() {
        let l1 = PolySpace::new(2, 1).unwrap();
        let a = SpherePoint::new(vec![0.0, 0.6, 0.8]).unwrap();
        let dup = PointSet::with_duplicates(
            2,
            vec![a.clone(), a, SpherePoint::new(vec![1.0, 0.0, 0.0]).unwrap(), SpherePoint::new(vec![0.0, 0.0, -1.0]).unwrap()],
        )
        .unwrap();
        let v = vandermonde(&l1, &dup).unwrap();
        assert_eq!(v.logabsdet(), Some(f64::NEG_INFINITY));
        assert_eq!(v.rank(), 3);

        let l0 = PolySpace::new(2, 0).unwrap();
        let single = PointSet::new(2, vec![SpherePoint::new(vec![0.2, 0.1, 0.9]).unwrap()]).unwrap();
        assert!(vandermonde(&l0, &single).unwrap().logabsdet().unwrap().abs() < 1e-15);

        // |det| = 3^{3/2} · 6 · vol = 16 for the regular tetrahedron.
        let tet = vandermonde(&l1, &tetrahedron()).unwrap();
        assert!((tet.logabsdet().unwrap() - 16f64.ln()).abs() < 1e-12);
        let rect = vandermonde(&l1, &single).unwrap();
        assert_eq!(rect.logabsdet(), None);
        assert_eq!(rect.rank(), 1);
    }

    #[test]
    fn greedy_cases() {
        let l0 = PolySpace::new(2, 0).unwrap();
        let mesh = generate_mesh(2, 30, MeshKind::Fibonacci).unwrap();
        let pick = greedy_select(&l0, &mesh).unwrap();
        assert_eq!(pick.points(), &mesh.points()[..1]);

        // Clusters of exact clones: one representative each.
        let l1 = PolySpace::new(2, 1).unwrap();
        let tet = tetrahedron();
        let clones: Vec<SpherePoint> = tet.iter().flat_map(|p| std::iter::repeat_n(p.clone(), 3)).collect();
        let mesh = PointSet::with_duplicates(2, clones).unwrap();
        let pick = greedy_select(&l1, &mesh).unwrap();
        assert_eq!(pick.len(), 4);
        let ld = vandermonde(&l1, &pick).unwrap().logabsdet().unwrap();
        assert!((ld - 16f64.ln()).abs() < 1e-12);

        // A mesh on a great circle cannot span Π_1 on S².
        let flat: Vec<SpherePoint> = (0..20).map(|i| SpherePoint::from_spherical(PI / 2.0, 0.3 * i as f64)).collect();
        let flat = PointSet::new(2, flat).unwrap();
        assert!(matches!(greedy_select(&l1, &flat), Err(Error::RankDeficient { rank: 3, needed: 4 })));
        assert!(matches!(greedy_select(&l1, &tet.clone().with_label("x")), Ok(_)));
        let small = PointSet::new(2, tet.points()[..3].to_vec()).unwrap();
        assert!(matches!(greedy_select(&l1, &small), Err(Error::TooFewPoints { .. })));
    }

    #[test]
    fn greedy_on_fibonacci_is_close_to_optimal() {
        let l1 = PolySpace::new(2, 1).unwrap();
        let mesh = generate_mesh(2, 500, MeshKind::Fibonacci).unwrap();
        let ld = vandermonde(&l1, &greedy_select(&l1, &mesh).unwrap()).unwrap().logabsdet().unwrap();
        let opt = 16f64.ln();
        assert!(ld >= 0.95 * opt, "{ld} vs {opt}");
    }

    #[test]
    fn refinement_at_optimum_is_a_no_op() {
        let l1 = PolySpace::new(2, 1).unwrap();
        let tet = tetrahedron();
        let (out, log) = refine_exchange(&l1, &tet, &FeketeConfig::default()).unwrap();
        assert_eq!(out.points(), tet.points());
        assert_eq!(log.iterations(), 0);
        assert_eq!(log.trace.len(), 1);
    }

    #[test]
    fn dilation_arithmetic() {
        assert_eq!(dilated_degree(4, 0.5, Direction::Up).unwrap(), 6);
        assert_eq!(dilated_degree(4, 0.5, Direction::Down).unwrap(), 2);
        assert_eq!(dilated_degree(5, 0.1, Direction::Up).unwrap(), 5);
        assert_eq!(dilated_degree(5, 0.4, Direction::Up).unwrap(), 7);
        assert_eq!(dilated_degree(10, 0.4, Direction::Down).unwrap(), 6);
        assert!(dilated_degree(3, 0.0, Direction::Up).is_err());
        assert!(dilated_degree(3, 1.5, Direction::Down).is_err());

        let mut z = TriangularArray::new(2, "test");
        for l in [2, 4, 6] {
            z.insert(l, generate_mesh(2, (l + 1) * (l + 1), MeshKind::Fibonacci).unwrap()).unwrap();
        }
        let up = dilate_array(&z, 0.5, Direction::Up, &[4]).unwrap();
        assert_eq!(up.get(4), z.get(6));
        let down = dilate_array(&z, 0.5, Direction::Down, &[4]).unwrap();
        assert_eq!(down.get(4), z.get(2));
        let same = dilate_array(&z, 0.1, Direction::Up, &[4]).unwrap();
        assert_eq!(same.get(4), z.get(4));
        match dilate_array(&z, 0.5, Direction::Up, &[4, 8, 10]) {
            Err(Error::MissingDegree(m)) => assert_eq!(m, vec![12, 15]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn config_validation() {
        let space = PolySpace::new(2, 3).unwrap();
        let mut c = FeketeConfig::default();
        assert!(c.validate(&space).is_ok());
        c.mesh_size = Some(40);
        assert!(c.validate(&space).is_err());
        c.mesh_size = None;
        c.stop_tol = 0.0;
        assert!(c.validate(&space).is_err());
    }
}
