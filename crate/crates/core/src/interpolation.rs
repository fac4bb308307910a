//! Cardinal functions, Lagrange interpolation, the localizing Jacobi weight
//! p(t) and the two weighted operators built from them: the reconstruction
//! Q_L on a denser node set and the interpolation R_L on a sparser one.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{PointSet, SpherePoint};
use crate::harmonics::{
    basis_matrix, estimate_sup, fill_basis, quadrature_rule, JacobiParams, PolySpace, PolynomialInSpace,
    SupEstimate,
};
use crate::solver::{dilated_degree, Direction};

/// The cardinal functions ℓ_i of a fundamental system, stored as
/// coefficient columns in the orthonormal basis (C = V⁻ᵀ).
#[derive(Debug, Clone)]
pub struct CardinalBasis {
    space: PolySpace,
    nodes: PointSet,
    coeffs: DMatrix<f64>,
    condition: f64,
    residual: f64,
}

pub fn cardinal_basis(space: &PolySpace, nodes: &PointSet) -> Result<CardinalBasis> {
    space.require_evaluable()?;
    let n = space.dim();
    if nodes.len() != n {
        return Err(Error::invalid(format!(
            "cardinal basis needs π_L = {n} nodes, got {}",
            nodes.len()
        )));
    }
    let v = basis_matrix(space, nodes)?;
    let sv = v.clone().svd(false, false).singular_values;
    let (max, min) = (sv.max(), sv.min());
    if !(min > crate::solver::RANK_RTOL * max) {
        return Err(Error::Singular);
    }
    let coeffs = v.transpose().lu().try_inverse().ok_or(Error::Singular)?;
    // ℓ_i(z_j) = (Cᵀ V)_{ij}
    let residual = (coeffs.transpose() * &v - DMatrix::<f64>::identity(n, n)).abs().max();
    Ok(CardinalBasis {
        space: *space,
        nodes: nodes.clone(),
        coeffs,
        condition: max / min,
        residual,
    })
}

impl CardinalBasis {
    pub fn space(&self) -> &PolySpace {
        &self.space
    }

    pub fn nodes(&self) -> &PointSet {
        &self.nodes
    }

    pub fn coeffs(&self) -> &DMatrix<f64> {
        &self.coeffs
    }

    /// 2-norm condition number of the Vandermonde matrix.
    pub fn condition_number(&self) -> f64 {
        self.condition
    }

    /// max |ℓ_i(z_j) − δ_ij| at construction.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn len(&self) -> usize {
        self.space.dim()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All cardinal values (ℓ_1(z), …, ℓ_n(z)).
    pub fn eval_all(&self, z: &SpherePoint) -> Result<DVector<f64>> {
        check_dim(&self.space, z)?;
        let mut y = DVector::zeros(self.space.dim());
        fill_basis(&self.space, z, y.as_mut_slice());
        Ok(self.coeffs.tr_mul(&y))
    }

    pub fn eval(&self, i: usize, z: &SpherePoint) -> Result<f64> {
        if i >= self.len() {
            return Err(Error::invalid(format!("cardinal index {i} out of range")));
        }
        check_dim(&self.space, z)?;
        let mut y = DVector::zeros(self.space.dim());
        fill_basis(&self.space, z, y.as_mut_slice());
        Ok(self.coeffs.column(i).dot(&y))
    }

    /// ℓ_i as a polynomial.
    pub fn cardinal(&self, i: usize) -> Result<PolynomialInSpace> {
        if i >= self.len() {
            return Err(Error::invalid(format!("cardinal index {i} out of range")));
        }
        PolynomialInSpace::new(self.space, self.coeffs.column(i).iter().copied().collect())
    }

    /// Mesh sup of |ℓ_i| for every i.
    pub fn sup_norms(&self) -> Result<Vec<f64>> {
        (0..self.len())
            .into_par_iter()
            .map(|i| {
                let c = self.coeffs.column(i).clone_owned();
                let space = self.space;
                let sup = estimate_sup(space.d(), space.degree(), |z| {
                    let mut y = DVector::zeros(space.dim());
                    fill_basis(&space, z, y.as_mut_slice());
                    c.dot(&y).abs()
                })?;
                Ok(sup.value)
            })
            .collect()
    }

    /// Mesh sup of the Lebesgue function Σ_j |ℓ_j|.
    pub fn lebesgue_constant(&self) -> Result<SupEstimate> {
        estimate_sup(self.space.d(), self.space.degree(), |z| {
            self.eval_all(z).map(|l| l.abs().sum()).unwrap_or(0.0)
        })
    }
}

fn check_dim(space: &PolySpace, z: &SpherePoint) -> Result<()> {
    if z.dim() != space.d() {
        return Err(Error::DimensionMismatch {
            expected: space.d(),
            found: z.dim(),
        });
    }
    Ok(())
}

/// Λ_L f = Σ f(z_j) ℓ_j.
pub fn lagrange_interpolate(basis: &CardinalBasis, values: &[f64]) -> Result<PolynomialInSpace> {
    if values.len() != basis.len() {
        return Err(Error::invalid(format!(
            "expected {} values, got {}",
            basis.len(),
            values.len()
        )));
    }
    let c = &basis.coeffs * DVector::from_column_slice(values);
    PolynomialInSpace::new(basis.space, c.iter().copied().collect())
}

/// p(t) = c·(P_k^{(d/2, d/2−1)}(t))² normalized so that p(1) = 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightPolynomial {
    d: usize,
    degree: usize,
    eps: f64,
    half_degree: usize,
    normalization: f64,
}

impl WeightPolynomial {
    /// Weight for degree L and dilation ε: k = ⌊εL/2⌋, so that
    /// L + 2k ≤ ⌊(1+ε)L⌋.
    pub fn new(d: usize, degree: usize, eps: f64) -> Result<Self> {
        let gap = dilated_degree(degree, eps, Direction::Up)? - degree;
        let mut w = Self::with_half_degree(d, degree, gap / 2)?;
        w.eps = eps;
        Ok(w)
    }

    /// Weight with an explicit half-degree k (degree 2k).
    pub fn with_half_degree(d: usize, degree: usize, k: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::UnsupportedDimension(d));
        }
        let jac = Self::jacobi(d, k)?;
        let at_one = jac.value_at_one();
        Ok(Self {
            d,
            degree,
            eps: if degree > 0 { 2.0 * k as f64 / degree as f64 } else { 0.0 },
            half_degree: k,
            normalization: 1.0 / (at_one * at_one),
        })
    }

    fn jacobi(d: usize, k: usize) -> Result<JacobiParams> {
        JacobiParams::new(k, d as f64 / 2.0, d as f64 / 2.0 - 1.0)
    }

    pub fn half_degree(&self) -> usize {
        self.half_degree
    }

    /// Polynomial degree 2k.
    pub fn degree(&self) -> usize {
        2 * self.half_degree
    }

    /// The degree L this weight was built for.
    pub fn base_degree(&self) -> usize {
        self.degree
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// False when k = 0 and p ≡ 1 (no localization).
    pub fn is_localized(&self) -> bool {
        self.half_degree > 0
    }

    pub fn eval(&self, t: f64) -> f64 {
        let t = t.clamp(-1.0, 1.0);
        if t == 1.0 {
            return 1.0;
        }
        let v = Self::jacobi(self.d, self.half_degree).expect("validated").eval(t);
        self.normalization * v * v
    }
}

/// Shared machinery of Q_L and R_L: Σ_j v_j p(⟨z, z_j⟩) ℓ_j(z).
#[derive(Debug, Clone)]
struct WeightedSum {
    basis: CardinalBasis,
    weight: WeightPolynomial,
}

impl WeightedSum {
    fn eval(&self, values: &[f64], z: &SpherePoint) -> Result<f64> {
        if values.len() != self.basis.len() {
            return Err(Error::invalid(format!(
                "expected {} values, got {}",
                self.basis.len(),
                values.len()
            )));
        }
        let l = self.basis.eval_all(z)?;
        Ok(self
            .basis
            .nodes
            .iter()
            .zip(values)
            .zip(l.iter())
            .map(|((zj, v), lj)| v * self.weight.eval(z.dot(zj)) * lj)
            .sum())
    }

    /// Values at many points at once; the matrix of products p·ℓ.
    fn kernel(&self, points: &PointSet) -> Result<DMatrix<f64>> {
        let y = basis_matrix(&self.basis.space, points)?;
        let mut k = self.basis.coeffs.tr_mul(&y);
        let nodes = self.basis.nodes.points();
        k.column_iter_mut().zip(points.iter()).for_each(|(mut col, z)| {
            for (j, zj) in nodes.iter().enumerate() {
                col[j] *= self.weight.eval(z.dot(zj));
            }
        });
        Ok(k)
    }

    fn degree(&self) -> usize {
        self.basis.space.degree() + self.weight.degree()
    }

    /// Σ_j p(⟨z, z_j⟩), the weight mass seen from z.
    fn weight_mass(&self, z: &SpherePoint) -> f64 {
        self.basis.nodes.iter().map(|zj| self.weight.eval(z.dot(zj))).sum()
    }
}

/// Q_L[v](z) = Σ_j v_j p(⟨z, z_j⟩) ℓ_{L_ε, j}(z) on the nodes Z(L_ε).
#[derive(Debug, Clone)]
pub struct MzReconstructor {
    degree: usize,
    inner: WeightedSum,
}

impl MzReconstructor {
    /// `nodes` must be a fundamental system for Π_{⌊(1+ε)L⌋}.
    pub fn new(d: usize, degree: usize, eps: f64, nodes: &PointSet) -> Result<Self> {
        let weight = WeightPolynomial::new(d, degree, eps)?;
        let l_eps = dilated_degree(degree, eps, Direction::Up)?;
        Self::with_weight(PolySpace::new(d, l_eps)?, nodes, weight)
    }

    /// General form: `space` is Π_{L_ε}, `weight` is built for L.
    pub fn with_weight(space: PolySpace, nodes: &PointSet, weight: WeightPolynomial) -> Result<Self> {
        if nodes.len() != space.dim() {
            return Err(Error::DegreeMismatch(format!(
                "{} nodes do not form a fundamental system for degree {} (π = {})",
                nodes.len(),
                space.degree(),
                space.dim()
            )));
        }
        if weight.base_degree() + weight.degree() > space.degree() || weight.dim() != space.d() {
            return Err(Error::DegreeMismatch(format!(
                "weight for degree {} has degree {}, nodes carry degree {}",
                weight.base_degree(),
                weight.degree(),
                space.degree()
            )));
        }
        let degree = weight.base_degree();
        Ok(Self {
            degree,
            inner: WeightedSum {
                basis: cardinal_basis(&space, nodes)?,
                weight,
            },
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn weight(&self) -> &WeightPolynomial {
        &self.inner.weight
    }

    pub fn basis(&self) -> &CardinalBasis {
        &self.inner.basis
    }

    pub fn nodes(&self) -> &PointSet {
        &self.inner.basis.nodes
    }

    pub fn eval(&self, values: &[f64], z: &SpherePoint) -> Result<f64> {
        self.inner.eval(values, z)
    }

    /// Polynomial degree of Q_L[v]: L_ε + 2k.
    pub fn output_degree(&self) -> usize {
        self.inner.degree()
    }

    /// ∫|Q_L[v]| dσ̃ by a product rule of exactness 2·(L_ε + 2k).
    pub fn l1_norm(&self, values: &[f64]) -> Result<f64> {
        let rule = quadrature_rule(self.inner.basis.space.d(), 2 * self.output_degree())?;
        let k = self.inner.kernel(rule.nodes())?;
        let q = k.tr_mul(&DVector::from_column_slice(values));
        Ok(q.iter().zip(rule.weights()).map(|(v, w)| w * v.abs()).sum())
    }

    /// Mesh sup of Σ_j p(⟨z, z_j⟩).
    pub fn weight_mass_sup(&self) -> Result<SupEstimate> {
        let space = &self.inner.basis.space;
        estimate_sup(space.d(), self.output_degree(), |z| self.inner.weight_mass(z))
    }
}

pub fn mz_reconstruct(op: &MzReconstructor, values: &[f64], z: &SpherePoint) -> Result<f64> {
    op.eval(values, z)
}

/// R_L on Z_{−ε}(L): Σ_j v_j p(⟨·, z_j⟩) ℓ_{L_{−ε}, j}, a polynomial of
/// degree ≤ L taking the value v_j at z_j.
#[derive(Debug, Clone)]
pub struct SparseInterpolator {
    target: PolySpace,
    inner: WeightedSum,
}

impl SparseInterpolator {
    /// Uses the largest weight that fits: k = ⌊(L − L_{−ε})/2⌋.
    pub fn new(d: usize, degree: usize, eps: f64, nodes: &PointSet) -> Result<Self> {
        let base = dilated_degree(degree, eps, Direction::Down)?;
        let weight = WeightPolynomial::with_half_degree(d, base, (degree - base) / 2)?;
        Self::with_weight(PolySpace::new(d, degree)?, nodes, weight)
    }

    /// General form: `target` is Π_L, `weight` is built for the node
    /// degree L_{−ε}.
    pub fn with_weight(target: PolySpace, nodes: &PointSet, weight: WeightPolynomial) -> Result<Self> {
        let base = PolySpace::new(target.d(), weight.base_degree())?;
        if nodes.len() != base.dim() {
            return Err(Error::DegreeMismatch(format!(
                "{} nodes do not form a fundamental system for degree {} (π = {})",
                nodes.len(),
                base.degree(),
                base.dim()
            )));
        }
        if base.degree() + weight.degree() > target.degree() {
            return Err(Error::DegreeMismatch(format!(
                "node degree {} plus weight degree {} exceeds target degree {}",
                base.degree(),
                weight.degree(),
                target.degree()
            )));
        }
        Ok(Self {
            target,
            inner: WeightedSum {
                basis: cardinal_basis(&base, nodes)?,
                weight,
            },
        })
    }

    pub fn target(&self) -> &PolySpace {
        &self.target
    }

    pub fn weight(&self) -> &WeightPolynomial {
        &self.inner.weight
    }

    pub fn nodes(&self) -> &PointSet {
        &self.inner.basis.nodes
    }

    pub fn eval(&self, values: &[f64], z: &SpherePoint) -> Result<f64> {
        self.inner.eval(values, z)
    }

    /// Coefficients in Π_L by projection with an exactness-2L rule.
    pub fn interpolate(&self, values: &[f64]) -> Result<PolynomialInSpace> {
        if values.len() != self.inner.basis.len() {
            return Err(Error::invalid(format!(
                "expected {} values, got {}",
                self.inner.basis.len(),
                values.len()
            )));
        }
        let rule = quadrature_rule(self.target.d(), 2 * self.target.degree())?;
        let k = self.inner.kernel(rule.nodes())?;
        let mut f = k.tr_mul(&DVector::from_column_slice(values));
        f.iter_mut().zip(rule.weights()).for_each(|(v, w)| *v *= w);
        let c = basis_matrix(&self.target, rule.nodes())? * f;
        PolynomialInSpace::new(self.target, c.iter().copied().collect())
    }
}

pub fn interpolate_sparse(op: &SparseInterpolator, values: &[f64]) -> Result<PolynomialInSpace> {
    op.interpolate(values)
}

/// Per-degree value vectors c_{Lj} with the exponent of their norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueArray {
    p: f64,
    values: BTreeMap<usize, Vec<f64>>,
}

impl ValueArray {
    pub fn new(p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::invalid(format!("exponent p = {p} must be >= 1")));
        }
        Ok(Self {
            p,
            values: BTreeMap::new(),
        })
    }

    pub fn insert(&mut self, degree: usize, values: Vec<f64>) {
        self.values.insert(degree, values);
    }

    pub fn get(&self, degree: usize) -> Option<&[f64]> {
        self.values.get(&degree).map(Vec::as_slice)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// ((1/π)Σ_j |c_{Lj}|^p)^{1/p}, or max |c_{Lj}| for p = ∞.
    pub fn discrete_norm(&self, degree: usize, normalizer: usize) -> Option<f64> {
        let v = self.values.get(&degree)?;
        if self.p.is_infinite() {
            return Some(v.iter().fold(0.0, |m, x| m.max(x.abs())));
        }
        let s: f64 = v.iter().map(|x| x.abs().powf(self.p)).sum();
        Some((s / normalizer as f64).powf(1.0 / self.p))
    }

    /// sup over stored degrees of the normalized discrete norms.
    pub fn sup_norm(&self, normalizer: impl Fn(usize) -> usize) -> f64 {
        self.values
            .keys()
            .filter_map(|&l| self.discrete_norm(l, normalizer(l)))
            .fold(0.0, f64::max)
    }
}
