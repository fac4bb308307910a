//! Points on S^d, the geodesic metric, spherical caps with their normalized
//! measure, candidate meshes and the plain-text point file format.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitCircle, UnitSphere};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::format_g;

/// Rows read from a file are renormalized when their norm is within this
/// distance of one and rejected otherwise.
pub const RENORMALIZE_TOL: f64 = 1e-6;

/// A unit vector in R^{d+1}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    coords: Vec<f64>,
}

impl SpherePoint {
    /// Normalizes `coords` onto the unit sphere. Fails on a zero or
    /// non-finite vector, or on fewer than two coordinates.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::invalid("a sphere point needs at least 2 coordinates"));
        }
        let norm = norm2(&coords);
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::invalid(format!("cannot normalize {coords:?}")));
        }
        let mut p = Self { coords };
        if norm != 1.0 {
            p.coords.iter_mut().for_each(|c| *c /= norm);
        }
        Ok(p)
    }

    /// Point on S¹ at angle `theta`.
    pub fn from_angle(theta: f64) -> Self {
        Self {
            coords: vec![theta.cos(), theta.sin()],
        }
    }

    /// Point on S² with colatitude `theta` and longitude `phi`.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self {
            coords: vec![st * cp, st * sp, ct],
        }
    }

    /// Wraps coordinates already known to be of unit norm.
    pub(crate) fn from_unit(coords: Vec<f64>) -> Self {
        debug_assert!((norm2(&coords) - 1.0).abs() < 1e-9);
        Self { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Dimension d of the sphere S^d containing the point.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn dot(&self, other: &SpherePoint) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Geodesic distance without the dimension check.
    pub fn distance(&self, other: &SpherePoint) -> f64 {
        self.dot(other).clamp(-1.0, 1.0).acos()
    }

    /// Colatitude and longitude of a point on S².
    pub fn spherical_angles(&self) -> (f64, f64) {
        let c = &self.coords;
        let rho = c[0].hypot(c[1]);
        (rho.atan2(c[2]), c[1].atan2(c[0]))
    }

    /// Angle of a point on S¹.
    pub fn angle(&self) -> f64 {
        self.coords[1].atan2(self.coords[0])
    }

    /// Moves along the ambient direction `step` (assumed tangent) and
    /// projects back onto the sphere.
    pub fn retract(&self, step: &[f64]) -> SpherePoint {
        let moved: Vec<f64> = self.coords.iter().zip(step).map(|(a, b)| a + b).collect();
        SpherePoint::new(moved).unwrap_or_else(|_| self.clone())
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// d(a, b) = arccos⟨a, b⟩, with the inner product clamped to [−1, 1].
pub fn geodesic_distance(a: &SpherePoint, b: &SpherePoint) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(a.distance(b))
}

/// Normalized measure σ̃(B(z, r)) of a geodesic cap on S^d, d ∈ {1, 2}.
pub fn cap_measure(radius: f64, d: usize) -> Result<f64> {
    if !(radius > 0.0 && radius <= PI) {
        return Err(Error::invalid(format!("cap radius {radius} outside (0, π]")));
    }
    match d {
        1 => Ok(radius / PI),
        // (1 - cos r) / 2, written to stay accurate for small r.
        2 => Ok((0.5 * radius).sin().powi(2)),
        _ => Err(Error::UnsupportedDimension(d)),
    }
}

/// Open geodesic cap B(center, radius) = {w : d(center, w) < radius}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphericalCap {
    center: SpherePoint,
    radius: f64,
}

impl SphericalCap {
    pub fn new(center: SpherePoint, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius <= PI) {
            return Err(Error::invalid(format!("cap radius {radius} outside (0, π]")));
        }
        Ok(Self { center, radius })
    }

    pub fn center(&self) -> &SpherePoint {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Strict membership; points exactly on the boundary are outside.
    pub fn contains(&self, p: &SpherePoint) -> bool {
        self.center.distance(p) < self.radius
    }

    pub fn measure(&self) -> Result<f64> {
        cap_measure(self.radius, self.center.dim())
    }
}

/// A finite set of points on one sphere S^d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    d: usize,
    points: Vec<SpherePoint>,
    label: Option<String>,
    allow_duplicates: bool,
}

impl PointSet {
    /// Builds a set of distinct points. Exact duplicates are rejected.
    pub fn new(d: usize, points: Vec<SpherePoint>) -> Result<Self> {
        Self::build(d, points, false)
    }

    /// Builds a set in which repeated points are explicitly permitted.
    pub fn with_duplicates(d: usize, points: Vec<SpherePoint>) -> Result<Self> {
        Self::build(d, points, true)
    }

    pub fn empty(d: usize) -> Self {
        Self {
            d,
            points: Vec::new(),
            label: None,
            allow_duplicates: false,
        }
    }

    fn build(d: usize, points: Vec<SpherePoint>, allow_duplicates: bool) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("sphere dimension must be at least 1"));
        }
        if let Some(p) = points.iter().find(|p| p.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: p.dim(),
            });
        }
        if !allow_duplicates {
            let mut seen = HashSet::with_capacity(points.len());
            for (i, p) in points.iter().enumerate() {
                let key: Vec<u64> = p.coords.iter().map(|c| (c + 0.0).to_bits()).collect();
                if !seen.insert(key) {
                    return Err(Error::invalid(format!(
                        "duplicate point at index {i}; use PointSet::with_duplicates"
                    )));
                }
            }
        }
        Ok(Self {
            d,
            points,
            label: None,
            allow_duplicates,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, SpherePoint> {
        self.points.iter()
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn allows_duplicates(&self) -> bool {
        self.allow_duplicates
    }

    pub fn into_points(self) -> Vec<SpherePoint> {
        self.points
    }

    /// Degree recorded in a `fekete L=<L> d=<d>` label, if any.
    pub fn fekete_degree(&self) -> Option<usize> {
        let label = self.label.as_deref()?;
        let rest = label.trim().strip_prefix("fekete")?;
        rest.split_whitespace()
            .find_map(|kv| kv.strip_prefix("L="))
            .and_then(|v| v.parse().ok())
    }

    /// Applies a linear map (typically a rotation) to every point.
    pub fn transformed(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Result<Self> {
        let points = self
            .points
            .iter()
            .map(|p| SpherePoint::new(f(p.coords())))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            d: self.d,
            points,
            label: self.label.clone(),
            allow_duplicates: true,
        })
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = &'a SpherePoint;
    type IntoIter = std::slice::Iter<'a, SpherePoint>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

/// Number of points strictly inside `cap`.
pub fn count_in_cap(points: &PointSet, cap: &SphericalCap) -> Result<usize> {
    if points.dim() != cap.center().dim() {
        return Err(Error::DimensionMismatch {
            expected: cap.center().dim(),
            found: points.dim(),
        });
    }
    Ok(points.iter().filter(|p| cap.contains(p)).count())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum MeshKind {
    /// Golden-angle spiral (S²) or golden-ratio angle sequence (S¹).
    Fibonacci,
    /// Independent uniform points from a seeded ChaCha8 stream.
    Random { seed: u64 },
    /// Latitude rings at midpoint colatitudes with counts ∝ sin θ (S²),
    /// equispaced angles (S¹).
    ProductGrid,
}

impl FromStr for MeshKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fibonacci" => Ok(MeshKind::Fibonacci),
            "grid" | "product-grid" => Ok(MeshKind::ProductGrid),
            "random" => Ok(MeshKind::Random { seed: 0 }),
            other => match other.strip_prefix("random:") {
                Some(seed) => seed
                    .parse()
                    .map(|seed| MeshKind::Random { seed })
                    .map_err(|_| Error::invalid(format!("bad random seed in {other:?}"))),
                None => Err(Error::invalid(format!(
                    "unknown mesh kind {other:?} (fibonacci | random[:seed] | grid)"
                ))),
            },
        }
    }
}

const GOLDEN_RATIO: f64 = 1.618_033_988_749_895;

/// Candidate mesh of `n` points on S^d.
pub fn generate_mesh(d: usize, n: usize, kind: MeshKind) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::invalid("mesh size must be at least 1"));
    }
    let points = match (d, kind) {
        (1, MeshKind::Fibonacci) => (0..n)
            .map(|i| SpherePoint::from_angle(2.0 * PI * (i as f64 / GOLDEN_RATIO).fract()))
            .collect(),
        (1, MeshKind::ProductGrid) => (0..n)
            .map(|i| SpherePoint::from_angle(2.0 * PI * i as f64 / n as f64))
            .collect(),
        (1, MeshKind::Random { seed }) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n)
                .map(|_| {
                    let [x, y]: [f64; 2] = UnitCircle.sample(&mut rng);
                    SpherePoint::new(vec![x, y]).expect("unit circle sample")
                })
                .collect()
        }
        (2, MeshKind::Fibonacci) => fibonacci_sphere(n),
        (2, MeshKind::ProductGrid) => latitude_rings(n),
        (2, MeshKind::Random { seed }) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            random_sphere_points(&mut rng, n)
        }
        (d, _) => return Err(Error::UnsupportedDimension(d)),
    };
    // Generated meshes never repeat points except through floating point
    // coincidences in random draws, which are harmless for candidates.
    Ok(PointSet::with_duplicates(d, points)?.with_label(format!("mesh {} n={n}", kind_name(kind))))
}

fn kind_name(kind: MeshKind) -> String {
    match kind {
        MeshKind::Fibonacci => "fibonacci".into(),
        MeshKind::ProductGrid => "grid".into(),
        MeshKind::Random { seed } => format!("random:{seed}"),
    }
}

fn fibonacci_sphere(n: usize) -> Vec<SpherePoint> {
    let golden_angle = 2.0 * PI * (1.0 - 1.0 / GOLDEN_RATIO);
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden_angle * i as f64;
            SpherePoint::from_unit(vec![rho * phi.cos(), rho * phi.sin(), z])
        })
        .collect()
}

fn latitude_rings(n: usize) -> Vec<SpherePoint> {
    if n == 1 {
        return vec![SpherePoint::from_unit(vec![0.0, 0.0, 1.0])];
    }
    let rings = ((n as f64 * PI / 4.0).sqrt().round() as usize).clamp(1, n);
    let thetas: Vec<f64> = (0..rings)
        .map(|i| PI * (i as f64 + 0.5) / rings as f64)
        .collect();
    let total: f64 = thetas.iter().map(|t| t.sin()).sum();
    // Largest-remainder apportionment so that the counts add up to n.
    let quotas: Vec<f64> = thetas.iter().map(|t| n as f64 * t.sin() / total).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut order: Vec<usize> = (0..rings).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let missing = n - counts.iter().sum::<usize>();
    for &i in order.iter().cycle().take(missing) {
        counts[i] += 1;
    }
    let mut points = Vec::with_capacity(n);
    for (ring, (&theta, &count)) in thetas.iter().zip(&counts).enumerate() {
        let offset = if ring % 2 == 0 { 0.0 } else { 0.5 };
        for k in 0..count {
            let phi = 2.0 * PI * (k as f64 + offset) / count as f64;
            points.push(SpherePoint::from_spherical(theta, phi));
        }
    }
    points
}

/// `n` independent uniform points on S².
pub fn random_sphere_points<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<SpherePoint> {
    (0..n)
        .map(|_| {
            let v: [f64; 3] = UnitSphere.sample(rng);
            SpherePoint::new(v.to_vec()).expect("unit sphere sample")
        })
        .collect()
}

/// `n` independent uniform points on S^d, d ∈ {1, 2}.
pub fn random_points<R: Rng + ?Sized>(rng: &mut R, d: usize, n: usize) -> Result<Vec<SpherePoint>> {
    match d {
        1 => Ok((0..n)
            .map(|_| SpherePoint::from_angle(rng.random_range(0.0..2.0 * PI)))
            .collect()),
        2 => Ok(random_sphere_points(rng, n)),
        d => Err(Error::UnsupportedDimension(d)),
    }
}

/// Writes `points` in the text point format:
///
/// ```text
/// # sphere d=<d> n=<count>
/// # <label, if any>
/// x0 x1 ... xd          (one row per point, %.17g)
/// ```
pub fn write_points(points: &PointSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, points_to_string(points)).map_err(|e| Error::io(path, e))
}

pub fn points_to_string(points: &PointSet) -> String {
    let mut out = format!("# sphere d={} n={}\n", points.dim(), points.len());
    if let Some(label) = points.label() {
        for line in label.lines() {
            let _ = writeln!(out, "# {line}");
        }
    }
    for p in points {
        let row: Vec<String> = p.coords().iter().map(|&c| format_g(c, 17)).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn read_points(path: impl AsRef<Path>) -> Result<PointSet> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_points(&text, path)
}

pub fn parse_points(text: &str, path: &Path) -> Result<PointSet> {
    let err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| err(1, "missing `# sphere d=<d> n=<count>` header".into()))?;
    let (d, n) = parse_header(header).ok_or_else(|| {
        err(1, format!("expected `# sphere d=<d> n=<count>`, found {header:?}"))
    })?;
    if d == 0 {
        return Err(err(1, "sphere dimension must be at least 1".into()));
    }

    let mut label: Vec<&str> = Vec::new();
    let mut points = Vec::with_capacity(n);
    for (i, line) in lines {
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            label.push(comment.trim());
            continue;
        }
        let coords = trimmed
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| err(lineno, format!("not a number: {tok:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if coords.len() != d + 1 {
            return Err(err(
                lineno,
                format!("expected {} coordinates, found {}", d + 1, coords.len()),
            ));
        }
        let norm = norm2(&coords);
        if !norm.is_finite() || (norm - 1.0).abs() > RENORMALIZE_TOL {
            return Err(err(
                lineno,
                format!("row norm {norm} deviates from 1 by more than {RENORMALIZE_TOL:e}"),
            ));
        }
        // Rows written by `write_points` are kept bit-for-bit.
        let point = if (norm - 1.0).abs() <= 4.0 * f64::EPSILON {
            SpherePoint { coords }
        } else {
            SpherePoint::new(coords).map_err(|e| err(lineno, e.to_string()))?
        };
        points.push(point);
    }
    if points.len() != n {
        return Err(err(
            text.lines().count().max(1),
            format!("header announces n={n} but {} rows were read", points.len()),
        ));
    }
    let set = PointSet::with_duplicates(d, points)?;
    Ok(if label.is_empty() {
        set
    } else {
        set.with_label(label.join("\n"))
    })
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let mut words = line.trim().strip_prefix('#')?.split_whitespace();
    if words.next()? != "sphere" {
        return None;
    }
    let mut d = None;
    let mut n = None;
    for kv in words {
        if let Some(v) = kv.strip_prefix("d=") {
            d = v.parse().ok();
        } else if let Some(v) = kv.strip_prefix("n=") {
            n = v.parse().ok();
        }
    }
    Some((d?, n?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(v: &[f64]) -> SpherePoint {
        SpherePoint::new(v.to_vec()).unwrap()
    }

    pub(crate) fn tetrahedron() -> PointSet {
        let s = 1.0 / 3f64.sqrt();
        PointSet::new(
            2,
            vec![
                p(&[s, s, s]),
                p(&[s, -s, -s]),
                p(&[-s, s, -s]),
                p(&[-s, -s, s]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn distance_special_cases() {
        let n = p(&[0.0, 0.0, 1.0]);
        assert_eq!(geodesic_distance(&n, &n).unwrap(), 0.0);
        assert_eq!(geodesic_distance(&n, &p(&[0.0, 0.0, -1.0])).unwrap(), PI);
        let d = geodesic_distance(&p(&[1.0, 0.0, 0.0]), &p(&[0.0, 1.0, 0.0])).unwrap();
        assert!((d - PI / 2.0).abs() < 1e-15);
        assert!(matches!(
            geodesic_distance(&n, &p(&[1.0, 0.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn distance_never_nan_for_nearly_equal_points() {
        let a = p(&[0.6, 0.8, 0.0]);
        let b = SpherePoint {
            coords: vec![0.6000000000000001, 0.8, 0.0],
        };
        assert!(a.distance(&b).is_finite());
    }

    #[test]
    fn cap_measure_values() {
        assert_eq!(cap_measure(PI, 2).unwrap(), 1.0);
        assert!((cap_measure(PI / 2.0, 2).unwrap() - 0.5).abs() < 1e-15);
        assert!((cap_measure(PI / 3.0, 2).unwrap() - 0.25).abs() < 1e-15);
        assert!((cap_measure(1.0, 1).unwrap() - 1.0 / PI).abs() < 1e-15);
        assert!(cap_measure(0.0, 2).is_err());
        assert!(cap_measure(3.5, 2).is_err());
        assert!(cap_measure(1.0, 3).is_err());
    }

    #[test]
    fn cap_measure_agrees_with_monte_carlo() {
        // 10^6 uniform samples; standard error of the hit frequency is
        // sqrt(p(1-p)/N) ≈ 4.3e-4 at p = 1/4.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let north = p(&[0.0, 0.0, 1.0]);
        let n = 1_000_000;
        for &r in &[PI / 3.0, 0.4, 2.0] {
            let hits = (0..n)
                .filter(|_| {
                    let v: [f64; 3] = UnitSphere.sample(&mut rng);
                    north.distance(&SpherePoint::from_unit(v.to_vec())) < r
                })
                .count();
            let freq = hits as f64 / n as f64;
            let exact = cap_measure(r, 2).unwrap();
            let se = (exact * (1.0 - exact) / n as f64).sqrt();
            assert!((freq - exact).abs() < 3.0 * se, "r={r}: {freq} vs {exact}");
            if r == PI / 3.0 {
                assert!((freq - 0.25).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn counting_in_caps() {
        let empty = PointSet::empty(2);
        let cap = SphericalCap::new(p(&[0.0, 0.0, 1.0]), 1.0).unwrap();
        assert_eq!(count_in_cap(&empty, &cap).unwrap(), 0);

        let tet = tetrahedron();
        let at_vertex = SphericalCap::new(tet.points()[0].clone(), 1.0).unwrap();
        assert_eq!(count_in_cap(&tet, &at_vertex).unwrap(), 1);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let seven = PointSet::new(2, random_sphere_points(&mut rng, 7)).unwrap();
        let whole = SphericalCap::new(p(&[0.3, -0.2, 0.9]), PI).unwrap();
        assert_eq!(count_in_cap(&seven, &whole).unwrap(), 7);
    }

    #[test]
    fn cap_boundary_is_open() {
        let cap = SphericalCap::new(p(&[0.0, 0.0, 1.0]), PI / 2.0).unwrap();
        assert!(!cap.contains(&p(&[1.0, 0.0, 0.0])));
        assert!(cap.contains(&p(&[1.0, 0.0, 1e-9])));
    }

    #[test]
    fn tetrahedron_pairwise_distance() {
        let tet = tetrahedron();
        let expected = (-1.0f64 / 3.0).acos();
        for (i, a) in tet.iter().enumerate() {
            for b in &tet.points()[i + 1..] {
                assert!((a.distance(b) - expected).abs() < 1e-12);
            }
        }
        assert!(expected > 1.0);
    }

    #[test]
    fn meshes() {
        for kind in [MeshKind::Fibonacci, MeshKind::ProductGrid, MeshKind::Random { seed: 5 }] {
            for d in [1, 2] {
                let one = generate_mesh(d, 1, kind).unwrap();
                assert_eq!(one.len(), 1);
                for n in [2, 17, 100] {
                    let m = generate_mesh(d, n, kind).unwrap();
                    assert_eq!(m.len(), n);
                    for q in &m {
                        assert!((norm2(q.coords()) - 1.0).abs() < 1e-12);
                    }
                }
            }
            assert!(generate_mesh(3, 10, kind).is_err());
            assert!(generate_mesh(2, 0, kind).is_err());
        }
        let a = generate_mesh(2, 50, MeshKind::Random { seed: 9 }).unwrap();
        let b = generate_mesh(2, 50, MeshKind::Random { seed: 9 }).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            generate_mesh(2, 50, MeshKind::Fibonacci).unwrap(),
            generate_mesh(2, 50, MeshKind::Fibonacci).unwrap()
        );
    }

    #[test]
    fn fibonacci_mesh_is_well_separated() {
        let n = 2000;
        let m = generate_mesh(2, n, MeshKind::Fibonacci).unwrap();
        let pts = m.points();
        let mut min = f64::INFINITY;
        for i in 0..n {
            for j in i + 1..n {
                min = min.min(pts[i].distance(&pts[j]));
            }
        }
        let c = min * (n as f64).sqrt();
        assert!(c > 0.5, "c = {c}");
    }

    #[test]
    fn duplicates_need_explicit_flag() {
        let a = p(&[1.0, 0.0, 0.0]);
        assert!(PointSet::new(2, vec![a.clone(), a.clone()]).is_err());
        assert!(PointSet::with_duplicates(2, vec![a.clone(), a]).is_ok());
    }

    #[test]
    fn file_round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tet.txt");
        let tet = tetrahedron().with_label("fekete L=1 d=2");
        write_points(&tet, &path).unwrap();
        let back = read_points(&path).unwrap();
        assert_eq!(back.len(), 4);
        for (a, b) in tet.iter().zip(&back) {
            for (x, y) in a.coords().iter().zip(b.coords()) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
        assert_eq!(back.fekete_degree(), Some(1));

        let bad = dir.path().join("bad.txt");
        std::fs::write(&bad, "# sphere d=2 n=1\n0 0 2\n").unwrap();
        match read_points(&bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }

        let near = dir.path().join("near.txt");
        std::fs::write(&near, "# sphere d=2 n=1\n0 0 1.0000005\n").unwrap();
        assert_eq!(read_points(&near).unwrap().points()[0].coords(), &[0.0, 0.0, 1.0]);

        let empty = dir.path().join("empty.txt");
        std::fs::write(&empty, "# sphere d=1 n=0\n").unwrap();
        let e = read_points(&empty).unwrap();
        assert!(e.is_empty());
        assert_eq!(e.dim(), 1);

        let junk = dir.path().join("junk.txt");
        std::fs::write(&junk, "# sphere d=2 n=2\n1 0 0\n0 x 1\n").unwrap();
        assert!(matches!(read_points(&junk), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(read_points(dir.path().join("missing")), Err(Error::Io { .. })));
    }

    fn arb_point() -> impl Strategy<Value = SpherePoint> {
        (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
            .prop_filter("nonzero", |(x, y, z)| x * x + y * y + z * z > 1e-6)
            .prop_map(|(x, y, z)| SpherePoint::new(vec![x, y, z]).unwrap())
    }

    proptest! {
        #[test]
        fn triangle_inequality(a in arb_point(), b in arb_point(), c in arb_point()) {
            let ab = a.distance(&b);
            let bc = b.distance(&c);
            let ac = a.distance(&c);
            prop_assert!(ac <= ab + bc + 1e-12);
            prop_assert!((ab - b.distance(&a)).abs() == 0.0);
            prop_assert!((0.0..=PI).contains(&ab));
        }

        #[test]
        fn cap_counts_partition(center in arb_point(), r in 0.01f64..PI, seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pts = PointSet::new(2, random_sphere_points(&mut rng, 40)).unwrap();
            let cap = SphericalCap::new(center.clone(), r).unwrap();
            let inside = count_in_cap(&pts, &cap).unwrap();
            let outside = pts.iter().filter(|q| center.distance(q) >= r).count();
            prop_assert_eq!(inside + outside, pts.len());
        }

        #[test]
        fn cap_measure_monotone(r1 in 1e-3f64..PI, r2 in 1e-3f64..PI) {
            let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
            for d in [1, 2] {
                prop_assert!(cap_measure(lo, d).unwrap() <= cap_measure(hi, d).unwrap());
            }
        }

        #[test]
        fn written_files_read_back_exactly(seed in 0u64..500, n in 0usize..20) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let set = PointSet::new(2, random_sphere_points(&mut rng, n)).unwrap();
            let text = points_to_string(&set);
            let back = parse_points(&text, Path::new("mem")).unwrap();
            prop_assert_eq!(back.points(), set.points());
        }
    }
}
