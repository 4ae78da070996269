//! Numerical verification toolkit for minimal capillary cones.
//!
//! The crate evaluates, at machine precision, the finite-dimensional
//! content of the stability analysis for capillary hypersurfaces meeting a
//! hyperplane at a fixed contact angle: spectral calculus for symmetric
//! functions of matrix eigenvalues, third-order jets of graph
//! parametrizations at free-boundary points, interior and boundary
//! curvature inequalities for convex one-homogeneous competitors, the
//! associated stability criterion, and brute-force reproduction of the
//! rigidity constants that drive the dimension-window conclusions.

pub mod error;
pub mod exact;
pub mod jet;
pub mod matrix;
pub mod rigidity;
pub mod simons;
pub mod spectral;
pub mod stability;

pub use error::{Error, Result};
