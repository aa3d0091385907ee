//! Points, isometries and hyperplanes of hyperbolic n-space.
//!
//! The hyperboloid `{x ∈ R^{n+1} : ⟨x,x⟩ = −1, x_n > 0}` with the form
//! `⟨x,y⟩ = x_0 y_0 + … + x_{n−1} y_{n−1} − x_n y_n` is the working model;
//! the Klein ball, Poincaré ball and upper half-space are charts reached
//! through [`convert`]. Boundary points live on the unit sphere `S^{n−1}`
//! and are lifted to the null vector `(ξ, 1)` when Minkowski algebra is
//! needed.

mod hyperplane;
mod isometry;
mod models;
mod point;
pub mod random;
mod straighten;

pub use hyperplane::{hyperplane_through, reflect_in, Hyperplane};
pub use isometry::Isometry;
pub use models::{
    ball_to_hyperboloid, convert, half_space_to_sphere, hyperboloid_to_ball, sphere_to_half_space, Model,
};
pub use point::{IdealPoint, SpacePoint, Vertex};
pub use straighten::straighten;

use crate::scalar::Real;

/// Minkowski form of signature `(n, 1)` with the time coordinate last.
#[inline]
pub fn minkowski_dot<T: Real>(x: &[T], y: &[T]) -> T {
    debug_assert_eq!(x.len(), y.len());
    let last = x.len() - 1;
    let mut s = -(x[last] * y[last]);
    for i in 0..last {
        s = s + x[i] * y[i];
    }
    s
}

/// `J·v` for `J = diag(1, …, 1, −1)`.
#[inline]
pub fn apply_form<T: Real>(v: &[T]) -> Vec<T> {
    let mut out = v.to_vec();
    if let Some(last) = out.last_mut() {
        *last = -*last;
    }
    out
}
