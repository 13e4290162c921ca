//! Bubble towers for the linearly perturbed critical Yamabe problem.
//!
//! The crate builds the tower ansatz `sum_j W_j` of rescaled Aubin–Talenti
//! bubbles, measures its interaction and error integrals by radial quadrature,
//! evaluates the finite-dimensional reduced energy and its sequential maximiser,
//! and computes curvature of warped products of spheres as a test oracle.
//!
//! Module map:
//! - [`quadrature`]: adaptive radial quadrature, moment reduction, L^q norms
//! - [`bubble`], [`solvability`]: bubbles, linearised kernel, curvature projection
//! - [`constants`]: energy constants and exponent schedule
//! - [`tower`]: ansatz, annuli, integrals, sweeps and slope fits
//! - [`reduced`]: reduced-energy model and its maximiser
//! - [`geometry`]: charts, curvature tensors, Weyl norm, point symmetries
//! - [`acceptance`]: the numbered acceptance criteria as library functions

// `!(x > 0.0)` guards reject NaN as well; tensor code indexes several arrays per loop.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod acceptance;
pub mod bubble;
pub mod constants;
pub mod error;
pub mod geometry;
pub mod quadrature;
pub mod reduced;
pub mod scaled;
pub mod solvability;
pub mod tower;

pub use error::{Error, Result};
pub use scaled::{Decimal, Scaled};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
