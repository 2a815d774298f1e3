//! Lattice-point moments of convex bodies, discrete Borell-type constants,
//! and Monte Carlo mean-width experiments for random symmetric polytopes.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bodies;
pub mod borell;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod linalg;
pub mod lp;
pub mod sampling;
pub mod scalar;

pub use bodies::{Classification, ConvexBody, Label, Radii, Rotation};
pub use error::{Error, Result};
pub use lattice::{enumerate, LatticePointSet, ProjectionDistribution};
pub use scalar::Scalar;
