//! Real orthonormal bases of Π_L on S¹ and S² (orthonormal for σ̃).
//!
//! Ordering is graded by degree. On S¹ degree k ≥ 1 contributes
//! `[√2 cos kθ, √2 sin kθ]`. On S² degree ℓ occupies indices ℓ²..(ℓ+1)²
//! with index ℓ² + ℓ + m for m = −ℓ..ℓ:
//!
//! * m = 0: `P̃_ℓ0(cos θ)`
//! * m > 0: `√2 P̃_ℓm(cos θ) cos mφ`
//! * m < 0: `√2 P̃_ℓ|m|(cos θ) sin |m|φ`
//!
//! where `P̃_ℓm = sqrt((2ℓ+1)(ℓ−m)!/(ℓ+m)!) P_ℓ^m` carries no Condon–Shortley
//! phase. The normalized Legendre values are produced by the usual upward
//! recurrences in ℓ for fixed m, which stay in range well past ℓ = 100.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::PolySpace;
use crate::error::{Error, Result};
use crate::geometry::{PointSet, SpherePoint};

/// Index of the (ℓ, m) element in the S² ordering.
pub fn sh_index(l: usize, m: i64) -> usize {
    ((l * l + l) as i64 + m) as usize
}

/// Evaluates all π_L basis functions at `z`.
pub fn basis_eval(space: &PolySpace, z: &SpherePoint) -> Result<Vec<f64>> {
    check(space, z)?;
    let mut out = vec![0.0; space.dim()];
    fill_basis(space, z, &mut out);
    Ok(out)
}

/// Column j holds the basis evaluated at `points[j]`.
pub fn basis_matrix(space: &PolySpace, points: &PointSet) -> Result<DMatrix<f64>> {
    if points.dim() != space.d() {
        return Err(Error::DimensionMismatch {
            expected: space.d(),
            found: points.dim(),
        });
    }
    space.require_evaluable()?;
    let n = space.dim();
    let mut data = vec![0.0; n * points.len()];
    if n > 0 {
        data.par_chunks_mut(n)
            .zip(points.points().par_iter())
            .for_each(|(col, p)| fill_basis(space, p, col));
    }
    Ok(DMatrix::from_vec(n, points.len(), data))
}

fn check(space: &PolySpace, z: &SpherePoint) -> Result<()> {
    space.require_evaluable()?;
    if z.dim() != space.d() {
        return Err(Error::DimensionMismatch {
            expected: space.d(),
            found: z.dim(),
        });
    }
    Ok(())
}

/// Writes the basis at `z` into `out` (length π_L). Assumes `space` is
/// evaluable and `z` lives on the right sphere.
pub(crate) fn fill_basis(space: &PolySpace, z: &SpherePoint, out: &mut [f64]) {
    match space.d() {
        1 => fill_circle(space.degree(), z.coords(), out),
        2 => fill_sphere(space.degree(), z.coords(), out, None),
        d => unreachable!("unsupported dimension {d}"),
    }
}

fn fill_circle(degree: usize, c: &[f64], out: &mut [f64]) {
    let (cos1, sin1) = (c[0], c[1]);
    out[0] = 1.0;
    let (mut ck, mut sk) = (1.0, 0.0);
    for k in 1..=degree {
        let next_c = ck * cos1 - sk * sin1;
        sk = sk * cos1 + ck * sin1;
        ck = next_c;
        out[2 * k - 1] = std::f64::consts::SQRT_2 * ck;
        out[2 * k] = std::f64::consts::SQRT_2 * sk;
    }
}

/// Derivative buffers filled alongside the values: ∂/∂θ and (1/sin θ)∂/∂φ.
struct SphereDerivs<'a> {
    d_theta: &'a mut [f64],
    d_phi_over_sin: &'a mut [f64],
}

/// Longitude cos/sin; the pole uses φ = 0 so the (e_θ, e_φ) frame extends
/// continuously along the φ = 0 meridian.
fn lon(c: &[f64]) -> (f64, f64, f64) {
    let s = c[0].hypot(c[1]);
    if s > 0.0 {
        (s, c[0] / s, c[1] / s)
    } else {
        (0.0, 1.0, 0.0)
    }
}

fn fill_sphere(degree: usize, c: &[f64], out: &mut [f64], mut derivs: Option<SphereDerivs<'_>>) {
    let x = c[2];
    let (s, cos_phi, sin_phi) = lon(c);
    let l_max = degree;
    let sqrt2 = std::f64::consts::SQRT_2;

    // Diagonal P̃_mm, its θ-derivative and P̃_mm / sin θ.
    let (mut pmm, mut dmm) = (1.0f64, 0.0f64);
    let (mut cos_m, mut sin_m) = (1.0f64, 0.0f64);
    for m in 0..=l_max {
        let mut q_mm = 0.0;
        if m > 0 {
            let cm = ((2 * m + 1) as f64 / (2 * m) as f64).sqrt();
            q_mm = cm * pmm;
            let new_p = cm * s * pmm;
            dmm = cm * (x * pmm + s * dmm);
            pmm = new_p;
            let next_c = cos_m * cos_phi - sin_m * sin_phi;
            sin_m = sin_m * cos_phi + cos_m * sin_phi;
            cos_m = next_c;
        }
        // Walk ℓ = m, m+1, ..., L for this order.
        let (mut p2, mut d2, mut q2) = (0.0, 0.0, 0.0);
        let (mut p1, mut d1, mut q1) = (pmm, dmm, q_mm);
        for l in m..=l_max {
            let (p, dp, q) = if l == m {
                (p1, d1, q1)
            } else {
                let lf = l as f64;
                let mf = m as f64;
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let b = if l == m + 1 {
                    0.0
                } else {
                    (((lf - 1.0).powi(2) - mf * mf) * (2.0 * lf + 1.0)
                        / ((2.0 * lf - 3.0) * (lf * lf - mf * mf)))
                        .sqrt()
                };
                let p = a * x * p1 - b * p2;
                let dp = a * (x * d1 - s * p1) - b * d2;
                let q = a * x * q1 - b * q2;
                p2 = p1;
                d2 = d1;
                q2 = q1;
                p1 = p;
                d1 = dp;
                q1 = q;
                (p, dp, q)
            };
            if m == 0 {
                let i = sh_index(l, 0);
                out[i] = p;
                if let Some(dv) = derivs.as_mut() {
                    dv.d_theta[i] = dp;
                    dv.d_phi_over_sin[i] = 0.0;
                }
            } else {
                let ic = sh_index(l, m as i64);
                let is = sh_index(l, -(m as i64));
                out[ic] = sqrt2 * p * cos_m;
                out[is] = sqrt2 * p * sin_m;
                if let Some(dv) = derivs.as_mut() {
                    let mf = m as f64;
                    dv.d_theta[ic] = sqrt2 * dp * cos_m;
                    dv.d_theta[is] = sqrt2 * dp * sin_m;
                    dv.d_phi_over_sin[ic] = -sqrt2 * mf * q * sin_m;
                    dv.d_phi_over_sin[is] = sqrt2 * mf * q * cos_m;
                }
            }
        }
    }
}

/// Orthonormal tangent frame at `z`: `[e_θ, e_φ]` on S² (φ = 0 at the
/// poles), `[e_θ]` on S¹.
pub fn tangent_frame(z: &SpherePoint) -> Result<Vec<Vec<f64>>> {
    let c = z.coords();
    match z.dim() {
        1 => Ok(vec![vec![-c[1], c[0]]]),
        2 => {
            let (s, cos_phi, sin_phi) = lon(c);
            let x = c[2];
            Ok(vec![
                vec![x * cos_phi, x * sin_phi, -s],
                vec![-sin_phi, cos_phi, 0.0],
            ])
        }
        d => Err(Error::UnsupportedDimension(d)),
    }
}

/// Tangential gradients of every basis function at `z`: a π_L × d matrix
/// whose rows are expressed in [`tangent_frame`].
pub fn basis_gradient(space: &PolySpace, z: &SpherePoint) -> Result<DMatrix<f64>> {
    check(space, z)?;
    let n = space.dim();
    let mut values = vec![0.0; n];
    match space.d() {
        1 => {
            let mut grad = DMatrix::zeros(n, 1);
            fill_circle(space.degree(), z.coords(), &mut values);
            for k in 1..=space.degree() {
                let kf = k as f64;
                // d/dθ [√2 cos kθ] = −k √2 sin kθ, d/dθ [√2 sin kθ] = k √2 cos kθ
                grad[(2 * k - 1, 0)] = -kf * values[2 * k];
                grad[(2 * k, 0)] = kf * values[2 * k - 1];
            }
            Ok(grad)
        }
        _ => {
            let mut d_theta = vec![0.0; n];
            let mut d_phi = vec![0.0; n];
            fill_sphere(
                space.degree(),
                z.coords(),
                &mut values,
                Some(SphereDerivs {
                    d_theta: &mut d_theta,
                    d_phi_over_sin: &mut d_phi,
                }),
            );
            let mut grad = DMatrix::zeros(n, 2);
            for i in 0..n {
                grad[(i, 0)] = d_theta[i];
                grad[(i, 1)] = d_phi[i];
            }
            Ok(grad)
        }
    }
}

/// Tangential gradients as ambient vectors: π_L × (d+1).
pub fn basis_gradient_ambient(space: &PolySpace, z: &SpherePoint) -> Result<DMatrix<f64>> {
    let frame_grad = basis_gradient(space, z)?;
    let frame = tangent_frame(z)?;
    let mut out = DMatrix::zeros(space.dim(), space.d() + 1);
    for (k, e) in frame.iter().enumerate() {
        for i in 0..space.dim() {
            let g = frame_grad[(i, k)];
            for (a, ea) in e.iter().enumerate() {
                out[(i, a)] += g * ea;
            }
        }
    }
    Ok(out)
}
