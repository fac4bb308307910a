//! Positive quadrature rules for σ̃ that are exact on Π_t.
//!
//! On S² the rule is a product of Gauss–Legendre nodes in cos θ with
//! t+1 equispaced longitudes; on S¹ it is t+1 equispaced angles.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::num::NonZeroUsize;
use std::path::Path;

use gauss_quad::legendre::GaussLegendre;

use crate::error::{Error, Result};
use crate::fmt::format_g;
use crate::geometry::{PointSet, SpherePoint};

#[derive(Debug, Clone)]
pub struct QuadratureRule {
    nodes: PointSet,
    weights: Vec<f64>,
    exactness: usize,
    /// Colatitudes (S²) or angles (S¹) with their aggregated weights.
    rings: Vec<(f64, f64)>,
    longitudes: usize,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &PointSet {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn exactness(&self) -> usize {
        self.exactness
    }

    pub fn dim(&self) -> usize {
        self.nodes.dim()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Σ w_i f(x_i).
    pub fn integrate(&self, mut f: impl FnMut(&SpherePoint) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(x))
            .sum()
    }

    /// Audit export: one `theta weight` row per colatitude ring (S²) or
    /// node angle (S¹) after a header carrying the exactness degree.
    pub fn export_string(&self) -> String {
        let mut out = format!(
            "# quadrature d={} exactness={} rings={} longitudes={}\n",
            self.dim(),
            self.exactness,
            self.rings.len(),
            self.longitudes
        );
        for (theta, w) in &self.rings {
            let _ = writeln!(out, "{} {}", format_g(*theta, 17), format_g(*w, 17));
        }
        out
    }

    pub fn export(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.export_string()).map_err(|e| Error::io(path, e))
    }
}

/// Rule exact for every polynomial in Π_t on S^d.
pub fn quadrature_rule(d: usize, t: usize) -> Result<QuadratureRule> {
    match d {
        1 => {
            let m = t + 1;
            let w = 1.0 / m as f64;
            let rings: Vec<(f64, f64)> = (0..m).map(|k| (2.0 * PI * k as f64 / m as f64, w)).collect();
            let points = rings.iter().map(|&(a, _)| SpherePoint::from_angle(a)).collect();
            Ok(QuadratureRule {
                nodes: PointSet::new(1, points)?,
                weights: vec![w; m],
                exactness: t,
                rings,
                longitudes: m,
            })
        }
        2 => {
            // n Gauss nodes integrate degree 2n-1 in cos θ exactly.
            let n = t / 2 + 1;
            let m = t + 1;
            let gl = GaussLegendre::new(NonZeroUsize::new(n).expect("n >= 1"));
            let mut rings: Vec<(f64, f64)> = gl
                .as_node_weight_pairs()
                .iter()
                .map(|&(x, w)| (x.clamp(-1.0, 1.0).acos(), 0.5 * w))
                .collect();
            rings.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut points = Vec::with_capacity(n * m);
            let mut weights = Vec::with_capacity(n * m);
            for &(theta, w) in &rings {
                for k in 0..m {
                    let phi = 2.0 * PI * k as f64 / m as f64;
                    points.push(SpherePoint::from_spherical(theta, phi));
                    weights.push(w / m as f64);
                }
            }
            Ok(QuadratureRule {
                nodes: PointSet::with_duplicates(2, points)?,
                weights,
                exactness: t,
                rings,
                longitudes: m,
            })
        }
        d => Err(Error::UnsupportedDimension(d)),
    }
}
