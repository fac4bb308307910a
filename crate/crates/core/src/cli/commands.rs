use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use serde_json::{json, Value};

use super::config::{Command, RunConfig};
use super::report::{finite_or_null, Csv, Report};
use crate::analysis::{
    cap_convergence, density_profile_at, fejes_toth_bound, frame_bounds_p2, local_pair_scan, molnar_kappa,
    mz_constant_general_p, separation,
};
use crate::error::{Error, Result};
use crate::geometry::{random_points, read_points, write_points, PointSet, SpherePoint};
use crate::harmonics::{PolySpace, PolynomialInSpace};
use crate::interpolation::{cardinal_basis, MzReconstructor, SparseInterpolator};
use crate::solver::{dilated_degree, Direction, SolveLog, TriangularArray};

/// Result of a command: the report (also written or printed) and any
/// certificate warnings that turn the exit code into 2.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub warnings: Vec<String>,
}

pub fn execute(config: &RunConfig) -> Result<Outcome> {
    let start = Instant::now();
    let (payload, warnings) = match config.command {
        Command::Generate => generate(config)?,
        Command::Analyze => (analyze(config)?, Vec::new()),
        Command::Mz => mz(config)?,
        Command::Interp => interp(config)?,
        Command::Study => study(config)?,
    };
    let report = Report::new(config.clone(), payload, start.elapsed().as_secs_f64());
    match out_dir(config)? {
        Some(dir) => report.write(&dir.join(format!("{}_report.json", config.command.name())))?,
        None => print!("{}", report.to_json()?),
    }
    Ok(Outcome { report, warnings })
}

fn out_dir(config: &RunConfig) -> Result<Option<PathBuf>> {
    let dir = match (&config.out, config.command) {
        (Some(dir), _) => dir.clone(),
        (None, Command::Generate) => PathBuf::from("."),
        (None, _) => return Ok(None),
    };
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    Ok(Some(dir))
}

pub fn point_file_name(d: usize, degree: usize) -> String {
    format!("fekete_d{d}_L{degree}.txt")
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn solve_logs_warnings(logs: &[SolveLog]) -> Vec<String> {
    logs.iter()
        .filter(|log| log.warning())
        .map(|log| {
            format!(
                "degree {}: certificate {:.6} (tolerance 1 + {}){}",
                log.degree,
                log.certificate,
                log.cert_tol,
                if log.capped { ", iteration cap reached" } else { "" }
            )
        })
        .collect()
}

fn generate(config: &RunConfig) -> Result<(Value, Vec<String>)> {
    let (array, logs) = TriangularArray::fekete(config.d, &config.degrees, &config.solver())?;
    let dir = out_dir(config)?.expect("generate always has an output directory");
    let mut sets = Vec::new();
    for log in &logs {
        let name = point_file_name(config.d, log.degree);
        write_points(array.require(log.degree)?, dir.join(&name))?;
        sets.push(json!({ "degree": log.degree, "file": name, "log": to_value(log)? }));
    }
    let warnings = solve_logs_warnings(&logs);
    Ok((json!({ "sets": sets, "warnings": warnings }), warnings))
}

/// Expands directories into their `.txt` files (sorted by name).
fn input_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut entries: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(|e| Error::io(p, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "txt"))
                .collect();
            entries.sort();
            files.extend(entries);
        } else {
            files.push(p.clone());
        }
    }
    Ok(files)
}

/// Fekete sets for `needed` degrees, from `--points` when given and
/// computed in-process otherwise.
fn source_array(config: &RunConfig, needed: &BTreeSet<usize>) -> Result<(TriangularArray, Vec<String>)> {
    let needed: Vec<usize> = needed.iter().copied().collect();
    if config.points.is_empty() {
        let (array, logs) = TriangularArray::fekete(config.d, &needed, &config.solver())?;
        return Ok((array, solve_logs_warnings(&logs)));
    }
    let mut array = TriangularArray::new(config.d, "point files");
    for file in input_files(&config.points)? {
        let set = read_points(&file)?;
        if set.dim() != config.d {
            continue;
        }
        if let Some(l) = set.fekete_degree() {
            array.insert(l, set)?;
        }
    }
    let missing: Vec<usize> = needed.iter().copied().filter(|&l| array.get(l).is_none()).collect();
    if !missing.is_empty() {
        return Err(Error::MissingDegree(missing));
    }
    Ok((array, Vec::new()))
}

fn analyze(config: &RunConfig) -> Result<Value> {
    let files = input_files(&config.points)?;
    if files.is_empty() {
        return Err(Error::invalid("analyze needs --points"));
    }
    let mut entries = Vec::new();
    for file in files {
        let set = read_points(&file)?;
        entries.push(analyze_set(config, &file, &set)?);
    }
    Ok(json!({ "files": entries }))
}

fn skip(skipped: &mut Vec<Value>, analysis: &str, reason: impl Into<String>) {
    skipped.push(json!({ "analysis": analysis, "reason": reason.into() }));
}

fn analyze_set(config: &RunConfig, file: &Path, set: &PointSet) -> Result<Value> {
    let mut skipped = Vec::new();
    let sep = if set.len() >= 2 {
        Some(separation(set)?)
    } else {
        skip(&mut skipped, "separation", "fewer than 2 points");
        None
    };
    let degrees: Vec<usize> = if !config.degrees.is_empty() {
        config.degrees.clone()
    } else if let Some(l) = set.fekete_degree() {
        vec![l]
    } else {
        skip(&mut skipped, "degree", "no --L and no `fekete L=` header");
        Vec::new()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut centers = if set.is_empty() {
        Vec::new()
    } else {
        random_points(&mut rng, set.dim(), config.samples)?
    };
    centers.extend(set.iter().cloned());

    let mut per_degree = Vec::new();
    for &l in &degrees {
        let space = PolySpace::new(set.dim(), l)?;
        let frame = frame_bounds_p2(&space, set)?;
        let mut densities = Vec::new();
        for &alpha in &config.alpha {
            if l == 0 || alpha / l as f64 > std::f64::consts::PI || set.is_empty() {
                skip(&mut skipped, "density", format!("degree {l}, α = {alpha}: α/L must lie in (0, π]"));
                continue;
            }
            densities.push(to_value(&density_profile_at(set, l, alpha, &centers)?)?);
        }
        let mut array = TriangularArray::new(set.dim(), file.display().to_string());
        array.insert(l, set.clone())?;
        let cap = if set.is_empty() {
            skip(&mut skipped, "cap", "empty point set");
            Value::Null
        } else {
            to_value(&cap_convergence(&array, &[l], config.radius, config.samples, config.seed)?)?
        };
        let extremal = if set.dim() == 2 && l >= 1 {
            to_value(&fejes_toth_bound(2, l)?)?
        } else {
            Value::Null
        };
        let pairs = match config.alpha.iter().cloned().reduce(f64::max) {
            Some(alpha) if l >= 1 && set.len() >= 2 => {
                to_value(&local_pair_scan(&array, l, alpha, config.samples, config.seed)?)?
            }
            _ => {
                skip(&mut skipped, "local_pairs", format!("degree {l}: needs L >= 1 and two points"));
                Value::Null
            }
        };
        per_degree.push(json!({
            "degree": l,
            "dim": space.dim(),
            "frame_bounds": to_value(&frame)?,
            "separation_ratio": sep.filter(|_| l > 0).map(|s| s / (std::f64::consts::PI / (2.0 * l as f64))),
            "extremal": extremal,
            "density": densities,
            "cap": cap,
            "local_pairs": pairs,
        }));
    }
    Ok(json!({
        "file": file.display().to_string(),
        "d": set.dim(),
        "num_points": set.len(),
        "label": set.label(),
        "separation": sep,
        "degrees": per_degree,
        "skipped": skipped,
    }))
}

fn random_poly(rng: &mut ChaCha8Rng, space: PolySpace) -> Result<PolynomialInSpace> {
    PolynomialInSpace::new(space, (0..space.dim()).map(|_| StandardNormal.sample(rng)).collect())
}

fn mz(config: &RunConfig) -> Result<(Value, Vec<String>)> {
    let source = |l| dilated_degree(l, config.eps, Direction::Up);
    let needed = config.degrees.iter().map(|&l| source(l)).collect::<Result<BTreeSet<_>>>()?;
    let (array, warnings) = source_array(config, &needed)?;
    let mut rows = Vec::new();
    let (mut min_a, mut max_b) = (f64::INFINITY, 0.0f64);
    for &l in &config.degrees {
        let src = source(l)?;
        let set = array.require(src)?;
        let space = PolySpace::new(config.d, l)?;
        let frame = frame_bounds_p2(&space, set)?;
        min_a = min_a.min(frame.lower);
        max_b = max_b.max(frame.upper);
        let p1 = mz_constant_general_p(&space, set, 1.0, config.trials, config.seed)?;
        let pinf = mz_constant_general_p(&space, set, f64::INFINITY, config.trials, config.seed)?;

        // Representation identity on a few random polynomials.
        let op = MzReconstructor::new(config.d, l, config.eps, set)?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ l as u64);
        let probes = random_points(&mut rng, config.d, 20)?;
        let mut reconstruction_error = 0.0f64;
        for _ in 0..5 {
            let q = random_poly(&mut rng, space)?;
            let v: Vec<f64> = op.nodes().iter().map(|z| q.eval(z)).collect::<Result<_>>()?;
            for z in &probes {
                reconstruction_error = reconstruction_error.max((op.eval(&v, z)? - q.eval(z)?).abs());
            }
        }
        let roots = if config.d == 1 {
            let n = 2 * l + 1;
            let pts = (0..n)
                .map(|k| SpherePoint::from_angle(2.0 * std::f64::consts::PI * k as f64 / n as f64))
                .collect();
            to_value(&frame_bounds_p2(&space, &PointSet::new(1, pts)?)?)?
        } else {
            Value::Null
        };
        rows.push(json!({
            "degree": l,
            "source_degree": src,
            "num_points": set.len(),
            "frame_bounds": to_value(&frame)?,
            "p1": to_value(&p1)?,
            "pinf": to_value(&pinf)?,
            "weight_half_degree": op.weight().half_degree(),
            "reconstruction_error": reconstruction_error,
            "roots_of_unity": roots,
        }));
    }
    let ratio = max_b / min_a;
    let summary = json!({
        "min_lower": min_a,
        "max_upper": max_b,
        "uniformity_ratio": finite_or_null(ratio),
        "lower_at_least_0.05": min_a >= 0.05,
        "upper_at_most_20": max_b <= 20.0,
        "ratio_at_most_400": ratio <= 400.0,
    });
    Ok((json!({ "eps": config.eps, "rows": rows, "summary": summary }), warnings))
}

fn interp(config: &RunConfig) -> Result<(Value, Vec<String>)> {
    let source = |l| dilated_degree(l, config.eps, Direction::Down);
    let needed = config.degrees.iter().map(|&l| source(l)).collect::<Result<BTreeSet<_>>>()?;
    let (array, warnings) = source_array(config, &needed)?;
    let mut rows = Vec::new();
    let (mut max_residual, mut max_ratio) = (0.0f64, 0.0f64);
    for &l in &config.degrees {
        let src = source(l)?;
        let set = array.require(src)?;
        let op = SparseInterpolator::new(config.d, l, config.eps, set)?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ l as u64);
        let (mut residual, mut ratio) = (0.0f64, 0.0f64);
        for _ in 0..5 {
            let v: Vec<f64> = (0..set.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
            let rms = (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt();
            let r = op.interpolate(&v)?;
            for (z, vj) in set.iter().zip(&v) {
                residual = residual.max((r.eval(z)? - vj).abs());
            }
            ratio = ratio.max(r.l2_norm() / rms);
        }
        max_residual = max_residual.max(residual);
        max_ratio = max_ratio.max(ratio);
        rows.push(json!({
            "degree": l,
            "source_degree": src,
            "num_points": set.len(),
            "weight_half_degree": op.weight().half_degree(),
            "residual": residual,
            "norm_ratio": ratio,
        }));
    }
    let summary = json!({
        "max_residual": max_residual,
        "max_norm_ratio": max_ratio,
        "residual_at_most_1e-7": max_residual <= 1e-7,
        "norm_ratio_at_most_10": max_ratio <= 10.0,
    });
    Ok((json!({ "eps": config.eps, "rows": rows, "summary": summary }), warnings))
}

pub const STUDY_COLUMNS: [&str; 8] = [
    "degree",
    "num_points",
    "cap_error",
    "separation",
    "l_times_separation",
    "l_times_fejes_toth",
    "kappa",
    "lebesgue_proxy",
];

fn study(config: &RunConfig) -> Result<(Value, Vec<String>)> {
    let needed: BTreeSet<usize> = config.degrees.iter().copied().collect();
    let (array, warnings) = source_array(config, &needed)?;
    let caps = cap_convergence(&array, &config.degrees, config.radius, config.samples, config.seed)?;
    let kappa = molnar_kappa();
    let mut csv = Csv::new(&STUDY_COLUMNS);
    let mut rows = Vec::new();
    for (&l, cap) in config.degrees.iter().zip(&caps.per_degree) {
        let set = array.require(l)?;
        let space = PolySpace::new(config.d, l)?;
        let sep = if set.len() >= 2 { separation(set)? } else { f64::NAN };
        let fejes = if config.d == 2 && l >= 1 {
            fejes_toth_bound(2, l)?.l_times_d
        } else {
            f64::NAN
        };
        let lebesgue = cardinal_basis(&space, set)?.lebesgue_constant()?.value;
        let row = [
            l as f64,
            set.len() as f64,
            cap.error,
            sep,
            l as f64 * sep,
            fejes,
            kappa,
            lebesgue,
        ];
        csv.row(&row);
        rows.push(
            STUDY_COLUMNS
                .iter()
                .zip(row)
                .map(|(k, v)| (k.to_string(), finite_or_null(v)))
                .collect::<serde_json::Map<_, _>>(),
        );
    }
    let first = caps.per_degree.first().map(|c| c.error);
    let last = caps.per_degree.last().map(|c| c.error);
    let trend_pass = config.degrees.len() >= 2 && matches!((first, last), (Some(a), Some(b)) if b < a);
    let trends = json!([{
        "name": "cap_error_decreases",
        "description": "e_L at the largest degree is below e_L at the smallest",
        "result": if trend_pass { "PASS" } else { "FAIL" },
    }]);
    let csv_file = match out_dir(config)? {
        Some(dir) => {
            let path = dir.join("study.csv");
            std::fs::write(&path, csv.render()).map_err(|e| Error::io(&path, e))?;
            Value::String("study.csv".into())
        }
        None => Value::Null,
    };
    Ok((
        json!({
            "radius": config.radius,
            "cap_measure": caps.cap_measure,
            "kappa_reference": kappa,
            "rows": rows,
            "trends": trends,
            "csv": csv_file,
            "columns": STUDY_COLUMNS,
        }),
        warnings,
    ))
}
