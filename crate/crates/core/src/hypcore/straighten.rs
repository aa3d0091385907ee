use super::{minkowski_dot, SpacePoint, Vertex};
use crate::error::{Error, Result};
use crate::linalg::axpy;
use crate::scalar::Real;

/// Evaluates the straight simplex on `vertices` at barycentric coordinates `t`.
///
/// The point is the normalization of `Σ tᵢ x̂ᵢ` back onto the hyperboloid,
/// where `x̂ᵢ` is the vertex itself or the null lift `(ξ, 1)` of an ideal
/// vertex. A horoball is `{x : −⟨x, ℓ⟩ < c}` for a null `ℓ`. Convex
/// combinations of finite vertices satisfy `−⟨s, s⟩ ≥ 1`, so normalizing only
/// shrinks the pairing and the image of a simplex inside a horoball stays in it.
///
/// Equivariance `straighten(g·x, t) = g·straighten(x, t)` holds for finite
/// vertices; the null lift of an ideal vertex is rescaled by `g`, which
/// reparametrizes `t` but keeps the image simplex.
pub fn straighten<T: Real>(vertices: &[Vertex<T>], t: &[T]) -> Result<SpacePoint<T>> {
    let Some(first) = vertices.first() else {
        return Err(Error::InvalidInput("no vertices".into()));
    };
    if t.len() != vertices.len() {
        return Err(Error::DimensionMismatch { expected: vertices.len(), got: t.len() });
    }
    let n = first.dim();
    if let Some(bad) = vertices.iter().find(|v| v.dim() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: bad.dim() });
    }
    let tol = T::coincidence_tol();
    let total: T = t.iter().copied().sum();
    if t.iter().any(|&ti| !(ti >= -tol)) || !((total - T::one()).abs() <= tol) {
        let shown: Vec<f64> = t.iter().map(|x| x.as_f64()).collect();
        return Err(Error::BarycentricOutOfRange(format!("{shown:?} (sum {})", total.as_f64())));
    }
    if let Some(i) = (0..t.len()).find(|&i| vertices[i].is_ideal() && t[i] >= T::one() - tol) {
        return Err(Error::IdealFullWeight(i));
    }
    let mut acc = vec![T::zero(); n + 1];
    for (v, &ti) in vertices.iter().zip(t) {
        if ti > T::zero() {
            axpy(&mut acc, ti, &v.lift());
        }
    }
    if !(minkowski_dot(&acc, &acc) < T::zero()) {
        // Only possible when all the weight sits on coincident ideal vertices.
        let heaviest = (0..t.len())
            .max_by(|&a, &b| t[a].partial_cmp(&t[b]).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(0);
        return Err(Error::IdealFullWeight(heaviest));
    }
    Ok(SpacePoint::from_timelike_unchecked(acc))
}
