//! Convex bodies, Banach–Mazur distance estimates and Euclidean contact-point
//! certificates.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bmd;
pub mod certificate;
pub mod constructions;
pub mod error;
pub mod geometry;
pub mod lp;
pub mod oracles;

pub use error::{Error, Result};
pub use geometry::{BodyExpr, LinearMap, Matrix, Polytope, Vector};
