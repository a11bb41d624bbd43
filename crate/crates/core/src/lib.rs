//! Lattice Seiberg–Witten toolkit on a flat 4-torus.
//!
//! Modules build bottom-up: pointwise spinor algebra, the periodic grid,
//! U(1) connections, the Dirac operator, the functional and its gradient,
//! the descent flow, and intersection-form screening.

// `!(x > 0.0)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod admissibility;
pub mod dirac;
pub mod error;
pub mod flow;
pub mod functional;
pub mod gauge;
pub mod geometry;
pub mod spinor_algebra;

pub use error::{Error, Result};
