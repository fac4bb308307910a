//! Approximate Fekete points (extremal fundamental systems) on the spheres
//! S¹ and S², together with the numerical machinery used to study them:
//! real orthonormal spherical harmonics, Vandermonde determinant
//! maximization, cardinal (Lagrange) functions, weighted reconstruction
//! operators, and equidistribution diagnostics.
//!
//! All integrals are taken against the normalized surface measure σ̃
//! (total mass one) and every harmonic basis is orthonormal for it.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod fmt;
pub mod geometry;
pub mod harmonics;
pub mod interpolation;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::{PointSet, SpherePoint, SphericalCap};
pub use harmonics::{PolySpace, PolynomialInSpace, QuadratureRule};
pub use solver::{FeketeConfig, TriangularArray, VandermondeSystem};
