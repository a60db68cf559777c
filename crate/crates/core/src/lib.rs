//! Numerical differential geometry on de Sitter space and its relatives,
//! realized as quadrics in five-dimensional pseudo-Euclidean space.
//!
//! Closed-form objects (metrics, connection coefficients, Killing fields,
//! Laplacian comparison quantities) are checked against finite-difference
//! computations built from the embedding alone.

// `!(x > 0.0)` style checks are how NaN gets rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ambient;
pub mod charts;
pub mod cli;
pub mod closed_forms;
pub mod diff;
pub mod error;
pub mod geodesic;
pub mod isometry;
pub mod linalg;
pub mod sampling;
pub mod tensor;
pub mod warped;

pub use ambient::{constraint_residual, flat_inner, AmbientPoint, Quadric, Signature};
pub use charts::{Chart, ChartKind, JacobianSource, MinkowskiPoint};
pub use diff::StepPolicy;
pub use error::{GeomError, Result};
pub use tensor::{Christoffel, CurvatureReport, MetricField, VectorField};
