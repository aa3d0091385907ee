// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Computational toolkit for hyperbolic n-space: the signed volume cocycle,
//! Monte-Carlo smearing over lattice quotients, and boundary-map rigidity
//! checks.
//!
//! Every geometric routine is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the scalar for the common case.

pub mod boundary;
pub mod error;
pub mod hypcore;
pub mod lattice;
pub mod linalg;
pub mod regref;
pub mod rigidity;
pub mod scalar;
pub mod smear;
pub mod volcocycle;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Isometry64 = hypcore::Isometry<f64>;
pub type SpacePoint64 = hypcore::SpacePoint<f64>;
pub type IdealPoint64 = hypcore::IdealPoint<f64>;
pub type Isometry32 = hypcore::Isometry<f32>;
pub type SpacePoint32 = hypcore::SpacePoint<f32>;
pub type IdealPoint32 = hypcore::IdealPoint<f32>;
pub type IdealSimplex64 = volcocycle::IdealSimplex<f64>;
pub type IdealSimplex32 = volcocycle::IdealSimplex<f32>;
