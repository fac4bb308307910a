//! Polynomial spaces Π_L on S^d, their orthonormal bases, quadrature and
//! norms.

mod basis;
mod jacobi;
mod quadrature;

pub use basis::{
    basis_eval, basis_gradient, basis_gradient_ambient, basis_matrix, sh_index, tangent_frame,
};
pub(crate) use basis::fill_basis;
pub use jacobi::{jacobi_eval, JacobiParams};
pub use quadrature::{quadrature_rule, QuadratureRule};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{generate_mesh, MeshKind, SpherePoint};

/// dim Π_L = ((d+2L)/d) · binom(d+L−1, L), in exact integer arithmetic.
pub fn space_dimension(d: usize, degree: usize) -> Result<usize> {
    if d == 0 {
        return Err(Error::invalid("sphere dimension must be at least 1"));
    }
    let (d128, l128) = (d as u128, degree as u128);
    // binom(d+L-1, L) = ∏_{k=1}^{L} (d-1+k)/k; each partial product is an
    // integer binomial coefficient, so the division is exact.
    let mut binom: u128 = 1;
    for k in 1..=l128 {
        binom = binom
            .checked_mul(d128 - 1 + k)
            .ok_or(Error::Overflow("dim Π_L"))?
            / k;
    }
    let dim = (d128 + 2 * l128)
        .checked_mul(binom)
        .ok_or(Error::Overflow("dim Π_L"))?
        / d128;
    usize::try_from(dim).map_err(|_| Error::Overflow("dim Π_L"))
}

/// The space Π_L of spherical harmonics of degree ≤ L on S^d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolySpace {
    d: usize,
    degree: usize,
    dim: usize,
}

impl PolySpace {
    /// Any d ≥ 1 is accepted; evaluation is only available for d ∈ {1, 2}.
    pub fn new(d: usize, degree: usize) -> Result<Self> {
        Ok(Self {
            d,
            degree,
            dim: space_dimension(d, degree)?,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// π_L.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_evaluable(&self) -> bool {
        matches!(self.d, 1 | 2)
    }

    pub(crate) fn require_evaluable(&self) -> Result<()> {
        if self.is_evaluable() {
            Ok(())
        } else {
            Err(Error::UnsupportedDimension(self.d))
        }
    }

    /// Index range of the degree-ℓ block in the graded ordering.
    pub fn block(&self, l: usize) -> std::ops::Range<usize> {
        let start = if l == 0 { 0 } else { space_dimension(self.d, l - 1).unwrap_or(0) };
        start..space_dimension(self.d, l).unwrap_or(start)
    }
}

/// Q ∈ Π_L stored by its coefficients in the orthonormal basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialInSpace {
    space: PolySpace,
    coeffs: Vec<f64>,
}

impl PolynomialInSpace {
    pub fn new(space: PolySpace, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != space.dim() {
            return Err(Error::invalid(format!(
                "expected {} coefficients, got {}",
                space.dim(),
                coeffs.len()
            )));
        }
        Ok(Self { space, coeffs })
    }

    pub fn zero(space: PolySpace) -> Self {
        Self {
            space,
            coeffs: vec![0.0; space.dim()],
        }
    }

    pub fn space(&self) -> &PolySpace {
        &self.space
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, z: &SpherePoint) -> Result<f64> {
        let y = basis_eval(&self.space, z)?;
        Ok(y.iter().zip(&self.coeffs).map(|(a, b)| a * b).sum())
    }

    /// L²(σ̃) norm via Parseval.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormQuality {
    /// Exact up to rounding (p = 2 with a rule of exactness ≥ 2L).
    Exact,
    /// Quadrature applied to a non-polynomial integrand |Q|^p.
    Approximate,
    /// Sup over a finite mesh, hence a lower bound of the true sup.
    MeshLowerBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpNorm {
    pub value: f64,
    pub quality: NormQuality,
}

/// ‖Q‖_{L^p(σ̃)} for p ∈ [1, ∞]; `p = f64::INFINITY` selects the sup norm,
/// which ignores `rule` and uses a dense mesh with local refinement.
pub fn lp_norm(q: &PolynomialInSpace, p: f64, rule: &QuadratureRule) -> Result<LpNorm> {
    let space = q.space();
    if !(p >= 1.0) {
        return Err(Error::invalid(format!("exponent p = {p} must be >= 1")));
    }
    if p.is_infinite() {
        let sup = estimate_sup(space.d(), space.degree(), |z| q.eval(z).map(f64::abs).unwrap_or(0.0))?;
        return Ok(LpNorm {
            value: sup.value,
            quality: NormQuality::MeshLowerBound,
        });
    }
    if rule.dim() != space.d() {
        return Err(Error::DimensionMismatch {
            expected: space.d(),
            found: rule.dim(),
        });
    }
    let need = 2 * space.degree();
    if rule.exactness() < need {
        return Err(Error::InsufficientExactness {
            have: rule.exactness(),
            need,
        });
    }
    let y = basis_matrix(space, rule.nodes())?;
    let c = nalgebra::DVector::from_column_slice(q.coeffs());
    let values = y.transpose() * c;
    let integral: f64 = values
        .iter()
        .zip(rule.weights())
        .map(|(v, w)| w * v.abs().powf(p))
        .sum();
    let value = integral.powf(1.0 / p);
    let quality = if p == 2.0 {
        let parseval = q.l2_norm();
        debug_assert!((value - parseval).abs() <= 1e-8 * parseval.max(1.0));
        NormQuality::Exact
    } else {
        NormQuality::Approximate
    };
    Ok(LpNorm { value, quality })
}

/// Sup estimate: the maximizing location and value plus the mesh used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupEstimate {
    pub value: f64,
    pub location: SpherePoint,
    pub mesh_size: usize,
}

/// Mesh size used for sup norms of degree-L objects: ≥ 40·L² on S².
pub fn sup_mesh_size(d: usize, degree: usize) -> usize {
    let l = degree.max(1);
    match d {
        1 => (40 * l).max(512),
        _ => (40 * l * l).max(2000),
    }
}

/// Maximizes `f` over a fibonacci mesh sized for degree `degree`, then
/// polishes the best mesh point with a local pattern search.
pub fn estimate_sup(
    d: usize,
    degree: usize,
    f: impl Fn(&SpherePoint) -> f64,
) -> Result<SupEstimate> {
    let mesh = generate_mesh(d, sup_mesh_size(d, degree), MeshKind::Fibonacci)?;
    let (best, value) = mesh
        .iter()
        .map(|z| (z, f(z)))
        .fold((None, f64::NEG_INFINITY), |(bz, bv), (z, v)| {
            if v > bv {
                (Some(z), v)
            } else {
                (bz, bv)
            }
        });
    let start = best.expect("non-empty mesh").clone();
    let (location, value) = local_maximize(&start, value, 0.5 / (degree.max(1) as f64), &f)?;
    Ok(SupEstimate {
        value,
        location,
        mesh_size: mesh.len(),
    })
}

/// Compass search on the sphere starting at `start` with initial step `h`.
pub fn local_maximize(
    start: &SpherePoint,
    start_value: f64,
    mut h: f64,
    f: impl Fn(&SpherePoint) -> f64,
) -> Result<(SpherePoint, f64)> {
    let mut best = start.clone();
    let mut best_v = start_value;
    let d = start.dim();
    let mut iterations = 0;
    while h > 1e-7 && iterations < 400 {
        iterations += 1;
        let frame = tangent_frame(&best)?;
        let mut directions: Vec<Vec<f64>> = Vec::new();
        for e in &frame {
            directions.push(e.clone());
            directions.push(e.iter().map(|v| -v).collect());
        }
        if d == 2 {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            for (a, b) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                directions.push((0..3).map(|k| s * (a * frame[0][k] + b * frame[1][k])).collect());
            }
        }
        let mut improved = false;
        for dir in &directions {
            let step: Vec<f64> = dir.iter().map(|v| v * h).collect();
            let cand = best.retract(&step);
            let v = f(&cand);
            if v > best_v {
                best = cand;
                best_v = v;
                improved = true;
                break;
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    Ok((best, best_v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::random_points;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn dimension_formula() {
        assert_eq!(space_dimension(2, 2).unwrap(), 9);
        assert_eq!(space_dimension(1, 3).unwrap(), 7);
        for d in 1..6 {
            assert_eq!(space_dimension(d, 0).unwrap(), 1);
        }
        for l in 0..=50 {
            assert_eq!(space_dimension(2, l).unwrap(), (l + 1) * (l + 1));
            assert_eq!(space_dimension(1, l).unwrap(), 2 * l + 1);
        }
        // S³: (L+1)(L+2)(2L+3)/6
        for l in 0..20 {
            assert_eq!(space_dimension(3, l).unwrap(), (l + 1) * (l + 2) * (2 * l + 3) / 6);
        }
        assert!(matches!(space_dimension(60, 100_000), Err(Error::Overflow(_))));
        assert!(space_dimension(0, 1).is_err());
    }

    #[test]
    fn blocks_partition_indices() {
        let s = PolySpace::new(2, 4).unwrap();
        assert_eq!(s.block(0), 0..1);
        assert_eq!(s.block(3), 9..16);
        let c = PolySpace::new(1, 4).unwrap();
        assert_eq!(c.block(2), 3..5);
    }

    fn random_poly(rng: &mut ChaCha8Rng, space: PolySpace) -> PolynomialInSpace {
        let coeffs = (0..space.dim()).map(|_| rng.sample(StandardNormal)).collect();
        PolynomialInSpace::new(space, coeffs).unwrap()
    }

    #[test]
    fn norms_of_constant() {
        let space = PolySpace::new(2, 3).unwrap();
        let mut coeffs = vec![0.0; space.dim()];
        coeffs[0] = 1.0;
        let one = PolynomialInSpace::new(space, coeffs).unwrap();
        let rule = quadrature_rule(2, 6).unwrap();
        for p in [1.0, 2.0, 3.5, f64::INFINITY] {
            let n = lp_norm(&one, p, &rule).unwrap();
            assert!((n.value - 1.0).abs() < 1e-12, "p={p}");
        }
        assert_eq!(lp_norm(&one, 2.0, &rule).unwrap().quality, NormQuality::Exact);
        assert_eq!(lp_norm(&one, 1.0, &rule).unwrap().quality, NormQuality::Approximate);
        let coarse = quadrature_rule(2, 5).unwrap();
        assert!(matches!(
            lp_norm(&one, 2.0, &coarse),
            Err(Error::InsufficientExactness { have: 5, need: 6 })
        ));
    }

    #[test]
    fn parseval_for_random_polynomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for d in [1, 2] {
            for l in [0, 1, 2, 5, 10, 20] {
                let space = PolySpace::new(d, l).unwrap();
                let rule = quadrature_rule(d, 2 * l).unwrap();
                for _ in 0..100 {
                    let q = random_poly(&mut rng, space);
                    let n = lp_norm(&q, 2.0, &rule).unwrap().value;
                    assert!((n - q.l2_norm()).abs() < 1e-10 * q.l2_norm().max(1.0));
                }
            }
        }
    }

    #[test]
    fn sup_norm_is_reasonable() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let space = PolySpace::new(2, 4).unwrap();
        let q = random_poly(&mut rng, space);
        let rule = quadrature_rule(2, 8).unwrap();
        let sup = lp_norm(&q, f64::INFINITY, &rule).unwrap();
        assert_eq!(sup.quality, NormQuality::MeshLowerBound);
        // No random point may beat the refined mesh sup by much.
        let pts = random_points(&mut rng, 2, 20_000).unwrap();
        let sampled = pts.iter().map(|z| q.eval(z).unwrap().abs()).fold(0.0, f64::max);
        assert!(sup.value >= sampled - 1e-9, "{} < {}", sup.value, sampled);
        assert!(sup.value >= lp_norm(&q, 2.0, &rule).unwrap().value);
    }

    /// Rotation about an axis (Rodrigues).
    fn rotate(axis: [f64; 3], angle: f64, v: &[f64]) -> Vec<f64> {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        let k = [axis[0] / n, axis[1] / n, axis[2] / n];
        let (s, c) = angle.sin_cos();
        let dot = k[0] * v[0] + k[1] * v[1] + k[2] * v[2];
        let cross = [k[1] * v[2] - k[2] * v[1], k[2] * v[0] - k[0] * v[2], k[0] * v[1] - k[1] * v[0]];
        (0..3).map(|i| v[i] * c + cross[i] * s + k[i] * dot * (1.0 - c)).collect()
    }

    #[test]
    fn block_norm_is_rotation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let space = PolySpace::new(2, 12).unwrap();
        for z in random_points(&mut rng, 2, 30).unwrap() {
            let axis = [rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5];
            let angle = rng.random_range(0.0..6.0);
            let rz = SpherePoint::new(rotate(axis, angle, z.coords())).unwrap();
            let a = basis_eval(&space, &z).unwrap();
            let b = basis_eval(&space, &rz).unwrap();
            for l in 0..=12 {
                let r = space.block(l);
                let na: f64 = a[r.clone()].iter().map(|v| v * v).sum::<f64>().sqrt();
                let nb: f64 = b[r].iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!((na - nb).abs() < 1e-10);
            }
        }
    }
}
