//! Geometric and norm-equivalence diagnostics for point arrays:
//! separation, frame bounds, density ratios, cap-count equidistribution
//! and the extremal packing constants on S².

use std::f64::consts::PI;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cap_measure, generate_mesh, random_points, MeshKind, PointSet, SpherePoint};
use crate::harmonics::{basis_matrix, fill_basis, local_maximize, quadrature_rule, sup_mesh_size, PolySpace};
use crate::solver::{TriangularArray, RANK_RTOL};

/// Minimal pairwise geodesic distance.
pub fn separation(points: &PointSet) -> Result<f64> {
    let pts = points.points();
    if pts.len() < 2 {
        return Err(Error::TooFewPoints {
            need: 2,
            got: pts.len(),
        });
    }
    // Largest inner product gives the smallest distance.
    let max_dot = (0..pts.len())
        .into_par_iter()
        .map(|i| {
            pts[i + 1..]
                .iter()
                .map(|q| pts[i].dot(q))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    let (i, j) = (0..pts.len())
        .flat_map(|i| (i + 1..pts.len()).map(move |j| (i, j)))
        .find(|&(i, j)| pts[i].dot(&pts[j]) == max_dot)
        .expect("maximum is attained");
    Ok(pts[i].distance(&pts[j]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    pub degree: usize,
    pub p: f64,
    pub num_points: usize,
    pub rank: usize,
    pub lower: f64,
    pub upper: f64,
    /// max(B, 1/A); infinite when A = 0.
    pub constant: f64,
}

/// Extreme eigenvalues of (1/π_L) Σ_j y(z_j) y(z_j)ᵀ.
pub fn frame_bounds_p2(space: &PolySpace, points: &PointSet) -> Result<FrameBounds> {
    space.require_evaluable()?;
    let n = space.dim();
    let (rank, lower, upper) = if points.is_empty() {
        (0, 0.0, 0.0)
    } else {
        let y = basis_matrix(space, points)?;
        let sv = y.clone().svd(false, false).singular_values;
        let rank = sv.iter().filter(|&&s| s > RANK_RTOL * sv.max()).count();
        let gram = (&y * y.transpose()) / n as f64;
        let eig = gram.symmetric_eigen().eigenvalues;
        let (min, max) = (eig.min(), eig.max());
        let lower = if rank < n { 0.0 } else { min };
        (rank, lower, max)
    };
    Ok(FrameBounds {
        degree: space.degree(),
        p: 2.0,
        num_points: points.len(),
        rank,
        lower,
        upper,
        constant: if lower > 0.0 { upper.max(1.0 / lower) } else { f64::INFINITY },
    })
}

/// Seeded estimate of the norm-equivalence constants for p ∈ {1, ∞}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MzEstimate {
    pub degree: usize,
    pub p: f64,
    pub trials: usize,
    pub seed: u64,
    /// Smallest observed discrete/continuous ratio.
    pub lower: f64,
    /// Largest observed discrete/continuous ratio.
    pub upper: f64,
    /// max(upper, 1/lower); infinite when some polynomial vanishes on
    /// every point.
    pub constant: f64,
    pub unbounded: bool,
}

/// Random-trial estimate of the constants in
/// A‖Q‖_p^p ≤ (1/π_L) Σ_j |Q(z_j)|^p ≤ B‖Q‖_p^p (p = 1) and
/// A‖Q‖_∞ ≤ max_j |Q(z_j)| ≤ B‖Q‖_∞ (p = ∞).
///
/// Half of the trials use Gaussian coefficients, half use reproducing
/// kernels centred at random points (localized polynomials).
pub fn mz_constant_general_p(space: &PolySpace, points: &PointSet, p: f64, trials: usize, seed: u64) -> Result<MzEstimate> {
    space.require_evaluable()?;
    if !(p == 1.0 || p.is_infinite()) {
        return Err(Error::invalid(format!("p = {p}: only 1 and ∞ are estimated (p = 2 is exact)")));
    }
    let n = space.dim();
    let mut est = MzEstimate {
        degree: space.degree(),
        p,
        trials,
        seed,
        lower: f64::INFINITY,
        upper: 0.0,
        constant: f64::INFINITY,
        unbounded: false,
    };
    let y_pts = if points.is_empty() {
        nalgebra::DMatrix::zeros(n, 0)
    } else {
        basis_matrix(space, points)?
    };
    let rank = if points.len() < n {
        points.len()
    } else {
        let sv = y_pts.clone().svd(false, false).singular_values;
        let max = sv.max();
        sv.iter().filter(|&&s| s > RANK_RTOL * max).count()
    };
    if rank < n {
        est.lower = 0.0;
        est.unbounded = true;
        return Ok(est);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs: Vec<DVector<f64>> = Vec::with_capacity(trials);
    let centers = random_points(&mut rng, space.d(), trials / 2)?;
    for c in &centers {
        let mut y = DVector::zeros(n);
        fill_basis(space, c, y.as_mut_slice());
        coeffs.push(y);
    }
    while coeffs.len() < trials {
        coeffs.push(DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng)));
    }

    let continuous: Vec<f64> = if p == 1.0 {
        // |Q| is not a polynomial; a rule of exactness 4L + 8 is used.
        let rule = quadrature_rule(space.d(), 4 * space.degree() + 8)?;
        let y = basis_matrix(space, rule.nodes())?;
        let w = DVector::from_column_slice(rule.weights());
        coeffs
            .par_iter()
            .map(|c| y.tr_mul(c).abs().dot(&w))
            .collect()
    } else {
        let mesh = generate_mesh(space.d(), sup_mesh_size(space.d(), space.degree()), MeshKind::Fibonacci)?;
        let y = basis_matrix(space, &mesh)?;
        let h = 0.5 / space.degree().max(1) as f64;
        coeffs
            .par_iter()
            .map(|c| {
                let v = y.tr_mul(c);
                let (i, best) = v.abs().argmax();
                let f = |z: &SpherePoint| {
                    let mut yz = DVector::zeros(n);
                    fill_basis(space, z, yz.as_mut_slice());
                    c.dot(&yz).abs()
                };
                local_maximize(&mesh.points()[i], best, h, f).map(|r| r.1)
            })
            .collect::<Result<_>>()?
    };
    for (c, cont) in coeffs.iter().zip(continuous) {
        let v = y_pts.tr_mul(c);
        let discrete = if p == 1.0 { v.abs().sum() / n as f64 } else { v.abs().max() };
        let ratio = discrete / cont;
        est.lower = est.lower.min(ratio);
        est.upper = est.upper.max(ratio);
    }
    est.constant = if est.lower > 0.0 { est.upper.max(1.0 / est.lower) } else { f64::INFINITY };
    Ok(est)
}

/// (count/π_L)/σ̃(B(z, α/L)) over sampled centers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub degree: usize,
    pub alpha: f64,
    pub radius: f64,
    pub samples: usize,
    pub seed: u64,
    pub centers: usize,
    pub num_points: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

/// Centers are `samples` seeded uniform points plus every point of Z(L).
pub fn density_profile(z: &TriangularArray, degree: usize, alpha: f64, samples: usize, seed: u64) -> Result<DensityEstimate> {
    let set = z.require(degree)?;
    let mut centers = random_points(&mut ChaCha8Rng::seed_from_u64(seed), z.dim(), samples)?;
    centers.extend(set.iter().cloned());
    let mut est = density_profile_at(set, degree, alpha, &centers)?;
    est.samples = samples;
    est.seed = seed;
    Ok(est)
}

pub fn density_profile_at(set: &PointSet, degree: usize, alpha: f64, centers: &[SpherePoint]) -> Result<DensityEstimate> {
    if degree == 0 {
        return Err(Error::invalid("density needs degree L >= 1"));
    }
    let radius = alpha / degree as f64;
    if !(radius > 0.0 && radius <= PI + 1e-12) {
        return Err(Error::invalid(format!("α/L = {radius} must lie in (0, π]")));
    }
    let radius = radius.min(PI);
    let n = PolySpace::new(set.dim(), degree)?.dim() as f64;
    let measure = cap_measure(radius, set.dim())?;
    let (min_ratio, max_ratio) = centers
        .par_iter()
        .map(|c| count_within(set, c, radius) as f64 / n / measure)
        .fold(|| (f64::INFINITY, 0.0f64), |(a, b), r| (a.min(r), b.max(r)))
        .reduce(|| (f64::INFINITY, 0.0f64), |(a, b), (c, d)| (a.min(c), b.max(d)));
    Ok(DensityEstimate {
        degree,
        alpha,
        radius,
        samples: centers.len(),
        seed: 0,
        centers: centers.len(),
        num_points: set.len(),
        min_ratio,
        max_ratio,
    })
}

/// Points at distance < r from `c`; the whole sphere when r = π.
fn count_within(set: &PointSet, c: &SpherePoint, r: f64) -> usize {
    if r >= PI {
        return set.len();
    }
    let cos_r = r.cos();
    set.iter().filter(|p| p.dot(c) > cos_r).count()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapError {
    pub degree: usize,
    pub num_points: usize,
    /// max_z |μ_L(B(z, r)) − σ̃(B(z, r))|.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquidistributionReport {
    pub radius: f64,
    pub samples: usize,
    pub seed: u64,
    pub cap_measure: f64,
    pub per_degree: Vec<CapError>,
}

impl EquidistributionReport {
    pub fn error(&self, degree: usize) -> Option<f64> {
        self.per_degree.iter().find(|e| e.degree == degree).map(|e| e.error)
    }
}

/// Cap-count errors with one seeded set of centers shared by all degrees.
pub fn cap_convergence(z: &TriangularArray, degrees: &[usize], r: f64, samples: usize, seed: u64) -> Result<EquidistributionReport> {
    let centers = random_points(&mut ChaCha8Rng::seed_from_u64(seed), z.dim(), samples)?;
    let mut report = cap_convergence_at(z, degrees, r, &centers)?;
    report.seed = seed;
    Ok(report)
}

pub fn cap_convergence_at(z: &TriangularArray, degrees: &[usize], r: f64, centers: &[SpherePoint]) -> Result<EquidistributionReport> {
    let missing: Vec<usize> = degrees.iter().copied().filter(|&l| z.get(l).is_none()).collect();
    if !missing.is_empty() {
        return Err(Error::MissingDegree(missing));
    }
    let measure = cap_measure(r, z.dim())?;
    let per_degree = degrees
        .iter()
        .map(|&l| {
            let set = z.require(l)?;
            let m = set.len() as f64;
            let error = centers
                .par_iter()
                .map(|c| (count_within(set, c, r) as f64 / m - measure).abs())
                .reduce(|| 0.0, f64::max);
            Ok(CapError {
                degree: l,
                num_points: set.len(),
                error,
            })
        })
        .collect::<Result<_>>()?;
    Ok(EquidistributionReport {
        radius: r,
        samples: centers.len(),
        seed: 0,
        cap_measure: measure,
        per_degree,
    })
}

pub fn molnar_kappa() -> f64 {
    4.0 * (PI / 12f64.sqrt()).sqrt()
}

/// (π/√12)·σ̃(B(α/L))/σ̃(B(η/(2L))): bound on the number of points with
/// pairwise distance ≥ η/L inside a cap of radius α/L.
pub fn molnar_bound(alpha: f64, eta: f64, degree: usize) -> Result<f64> {
    if degree == 0 {
        return Err(Error::invalid("degree must be >= 1"));
    }
    let l = degree as f64;
    Ok(PI / 12f64.sqrt() * cap_measure(alpha / l, 2)? / cap_measure(eta / (2.0 * l), 2)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalConstants {
    pub degree: usize,
    pub omega: f64,
    /// Upper bound on the minimal distance of (L+1)² points on S².
    pub d_l: f64,
    pub l_times_d: f64,
    pub kappa: f64,
}

/// ω_L = N/(N−2)·π/6 and d_L = arccos((cot²ω_L − 1)/2) with N = (L+1)².
pub fn fejes_toth_bound(d: usize, degree: usize) -> Result<ExtremalConstants> {
    if d != 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    if degree == 0 {
        return Err(Error::invalid("Fejes Tóth bound needs L >= 1"));
    }
    let n = ((degree + 1) * (degree + 1)) as f64;
    let h = PI / 6.0 * 2.0 / (n - 2.0);
    let omega = PI / 6.0 + h;
    // 1 − cos d_L written without cancellation.
    let s = omega.sin();
    let one_minus = 2.0 * h.sin() * (PI / 3.0 + h).sin() / (s * s);
    let d_l = 2.0 * (0.5 * one_minus).sqrt().min(1.0).asin();
    Ok(ExtremalConstants {
        degree,
        omega,
        d_l,
        l_times_d: degree as f64 * d_l,
        kappa: molnar_kappa(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalPairScan {
    pub degree: usize,
    pub alpha: f64,
    pub samples: usize,
    pub seed: u64,
    /// Max over caps of the min pairwise distance inside the cap.
    pub worst: f64,
    pub caps_used: usize,
    pub caps_skipped: usize,
}

impl LocalPairScan {
    /// (κ + ε)/L.
    pub fn bound(&self, eps: f64) -> f64 {
        (molnar_kappa() + eps) / self.degree as f64
    }
}

pub fn local_pair_scan(z: &TriangularArray, degree: usize, alpha: f64, samples: usize, seed: u64) -> Result<LocalPairScan> {
    let set = z.require(degree)?;
    if degree == 0 {
        return Err(Error::invalid("degree must be >= 1"));
    }
    let r = alpha / degree as f64;
    let centers = random_points(&mut ChaCha8Rng::seed_from_u64(seed), z.dim(), samples)?;
    let local: Vec<Option<f64>> = centers
        .par_iter()
        .map(|c| {
            let inside: Vec<SpherePoint> = set
                .iter()
                .filter(|p| r >= PI || p.distance(c) < r)
                .cloned()
                .collect();
            if inside.len() < 2 {
                None
            } else {
                PointSet::with_duplicates(set.dim(), inside).and_then(|s| separation(&s)).ok()
            }
        })
        .collect();
    let used: Vec<f64> = local.iter().flatten().copied().collect();
    Ok(LocalPairScan {
        degree,
        alpha,
        samples,
        seed,
        worst: used.iter().copied().fold(f64::NAN, f64::max),
        caps_used: used.len(),
        caps_skipped: local.len() - used.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tetrahedron() -> PointSet {
        let s = 1.0 / 3f64.sqrt();
        PointSet::new(
            2,
            [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]]
                .iter()
                .map(|c| SpherePoint::new(c.to_vec()).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn roots_of_unity(n: usize) -> PointSet {
        PointSet::new(1, (0..n).map(|k| SpherePoint::from_angle(2.0 * PI * k as f64 / n as f64)).collect()).unwrap()
    }

    #[test]
    fn separation_cases() {
        let pair = PointSet::new(
            2,
            vec![SpherePoint::new(vec![0.0, 0.0, 1.0]).unwrap(), SpherePoint::new(vec![0.0, 0.0, -1.0]).unwrap()],
        )
        .unwrap();
        assert!((separation(&pair).unwrap() - PI).abs() < 1e-15);
        assert!((separation(&tetrahedron()).unwrap() - (-1.0f64 / 3.0).acos()).abs() < 1e-12);
        let single = PointSet::new(2, vec![SpherePoint::new(vec![1.0, 0.0, 0.0]).unwrap()]).unwrap();
        assert!(matches!(separation(&single), Err(Error::TooFewPoints { .. })));
    }

    #[test]
    fn roots_of_unity_are_tight_frames() {
        for l in 0..=20 {
            let f = frame_bounds_p2(&PolySpace::new(1, l).unwrap(), &roots_of_unity(2 * l + 1)).unwrap();
            assert!((f.lower - 1.0).abs() < 1e-10 && (f.upper - 1.0).abs() < 1e-10, "L={l} {f:?}");
            assert!((f.constant - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn frame_bounds_rank_deficiency() {
        let l2 = PolySpace::new(2, 2).unwrap();
        let f = frame_bounds_p2(&l2, &tetrahedron()).unwrap();
        assert_eq!(f.lower, 0.0);
        assert!(f.constant.is_infinite());
        assert_eq!(f.rank, 4);
        let empty = frame_bounds_p2(&l2, &PointSet::empty(2)).unwrap();
        assert_eq!((empty.lower, empty.upper), (0.0, 0.0));
    }

    #[test]
    fn frame_bounds_rotation_invariant() {
        let space = PolySpace::new(2, 4).unwrap();
        let mesh = generate_mesh(2, 60, MeshKind::Fibonacci).unwrap();
        let (c, s) = (0.7f64.cos(), 0.7f64.sin());
        let rotated = mesh.transformed(|x| vec![c * x[0] - s * x[2], x[1], s * x[0] + c * x[2]]).unwrap();
        let a = frame_bounds_p2(&space, &mesh).unwrap();
        let b = frame_bounds_p2(&space, &rotated).unwrap();
        assert!((a.lower - b.lower).abs() < 1e-8 && (a.upper - b.upper).abs() < 1e-8);
    }

    #[test]
    fn general_p_estimates() {
        let l3 = PolySpace::new(2, 3).unwrap();
        let single = PointSet::new(2, vec![SpherePoint::new(vec![0.0, 1.0, 0.0]).unwrap()]).unwrap();
        let e = mz_constant_general_p(&l3, &single, f64::INFINITY, 10, 1).unwrap();
        assert!(e.unbounded && e.constant.is_infinite());

        // A dense, nearly equal-area mesh behaves like a quadrature rule.
        let space = PolySpace::new(2, 4).unwrap();
        let dense = generate_mesh(2, space.dim(), MeshKind::Fibonacci).unwrap();
        let e = mz_constant_general_p(&space, &dense, 1.0, 200, 9).unwrap();
        assert!(e.constant < 2.0, "{e:?}");
        let again = mz_constant_general_p(&space, &dense, 1.0, 200, 9).unwrap();
        assert_eq!(e, again);
        assert!(mz_constant_general_p(&space, &dense, 2.0, 10, 1).is_err());
    }

    #[test]
    fn density_cases() {
        let l = 10;
        let n = PolySpace::new(2, l).unwrap().dim();
        let mut z = TriangularArray::new(2, "fibonacci");
        z.insert(l, generate_mesh(2, n, MeshKind::Fibonacci).unwrap()).unwrap();
        let full = density_profile(&z, l, PI * l as f64, 20, 1).unwrap();
        assert_eq!((full.min_ratio, full.max_ratio), (1.0, 1.0));
        let big = density_profile(&z, l, 16.0, 200, 1).unwrap();
        assert!(big.min_ratio >= 0.7 && big.max_ratio <= 1.3, "{big:?}");
        assert!(density_profile(&z, l, 40.0, 5, 1).is_err());
        assert!(matches!(density_profile(&z, 3, 1.0, 5, 1), Err(Error::MissingDegree(_))));
    }

    #[test]
    fn cap_convergence_cases() {
        let north = SpherePoint::new(vec![0.0, 0.0, 1.0]).unwrap();
        let cluster: Vec<SpherePoint> = (0..5)
            .map(|k| SpherePoint::from_spherical(0.1, k as f64))
            .collect();
        let mut z = TriangularArray::new(2, "cluster");
        z.insert(1, PointSet::new(2, cluster).unwrap()).unwrap();
        let r = 0.5;
        let rep = cap_convergence_at(&z, &[1], r, &[north]).unwrap();
        assert!((rep.error(1).unwrap() - (1.0 - cap_measure(r, 2).unwrap())).abs() < 1e-15);
        let all = cap_convergence(&z, &[1], PI, 10, 3).unwrap();
        assert_eq!(all.error(1), Some(0.0));
        assert!(matches!(cap_convergence(&z, &[1, 2], 1.0, 3, 0), Err(Error::MissingDegree(v)) if v == vec![2]));
    }

    #[test]
    fn fejes_toth_values() {
        let c1 = fejes_toth_bound(2, 1).unwrap();
        assert!((c1.omega - PI / 3.0).abs() < 1e-15);
        assert!((c1.d_l - (-1.0f64 / 3.0).acos()).abs() < 1e-12);
        // L·d_L ≈ κ·L/(L+1), so the gap to κ decays like κ/L.
        for l in [10_000usize, 1_000_000] {
            let c = fejes_toth_bound(2, l).unwrap();
            let gap = molnar_kappa() - c.l_times_d;
            assert!(gap > 0.0 && gap < 1.1 * molnar_kappa() / l as f64, "L={l} gap={gap}");
        }
        let mut prev = 0.0;
        for l in 1..=1000 {
            let c = fejes_toth_bound(2, l).unwrap();
            assert!(c.l_times_d >= prev);
            prev = c.l_times_d;
        }
        assert!(fejes_toth_bound(1, 3).is_err());
        assert!(fejes_toth_bound(2, 0).is_err());
    }

    #[test]
    fn molnar_values() {
        assert!((molnar_kappa() - 3.80925).abs() < 1e-5);
        let b = molnar_bound(1e-4, 1e-4, 1).unwrap();
        assert!((b - 4.0 * PI / 12f64.sqrt()).abs() < 1e-6);
        let direct = PI / 12f64.sqrt() * cap_measure(0.5, 2).unwrap() / cap_measure(0.25, 2).unwrap();
        assert!((molnar_bound(5.0, 5.0, 10).unwrap() - direct).abs() < 1e-15);
    }

    #[test]
    fn local_pair_scan_cases() {
        let a = SpherePoint::new(vec![0.0, 0.0, 1.0]).unwrap();
        let b = SpherePoint::from_spherical(0.2, 0.0);
        let mut z = TriangularArray::new(2, "pair");
        z.insert(1, PointSet::new(2, vec![a.clone(), b.clone()]).unwrap()).unwrap();
        let scan = local_pair_scan(&z, 1, PI, 10, 2).unwrap();
        assert!((scan.worst - a.distance(&b)).abs() < 1e-15);
        assert_eq!(scan.caps_used, 10);
        let tight = local_pair_scan(&z, 1, 0.01, 10, 2).unwrap();
        assert_eq!(tight.caps_skipped, 10);
        assert!(tight.worst.is_nan());
    }
}
