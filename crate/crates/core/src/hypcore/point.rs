use serde::{Deserialize, Serialize};

use super::minkowski_dot;
use crate::error::{Error, Result};
use crate::linalg::{distance, norm, scaled};
use crate::scalar::Real;

/// A point of ℍⁿ in hyperboloid coordinates (time coordinate last).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<T>", into = "Vec<T>")]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct SpacePoint<T> {
    coords: Vec<T>,
}

impl<T: Real> SpacePoint<T> {
    /// Accepts any future-pointing timelike vector within a loose band of the
    /// hyperboloid and projects it back onto the hyperboloid exactly.
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: coords.len() });
        }
        let q = minkowski_dot(&coords, &coords);
        let t = coords[coords.len() - 1];
        let band = T::lit(1e-6) * T::one().max(t * t);
        if !(t > T::zero()) || (q + T::one()).abs() > band {
            return Err(Error::OutOfModel {
                model: "hyperboloid",
                detail: format!("⟨x,x⟩ = {}, time = {}", q.as_f64(), t.as_f64()),
            });
        }
        Ok(Self::from_timelike_unchecked(coords))
    }

    /// Normalizes a future-pointing timelike vector onto the hyperboloid.
    pub fn from_timelike(v: Vec<T>) -> Result<Self> {
        let q = minkowski_dot(&v, &v);
        if !(q < T::zero()) || !(v[v.len() - 1] > T::zero()) {
            return Err(Error::OutOfModel {
                model: "hyperboloid",
                detail: format!("vector is not future timelike (⟨v,v⟩ = {})", q.as_f64()),
            });
        }
        Ok(Self::from_timelike_unchecked(v))
    }

    pub(crate) fn from_timelike_unchecked(v: Vec<T>) -> Self {
        let q = minkowski_dot(&v, &v);
        let s = T::one() / (-q).sqrt();
        Self { coords: scaled(&v, s) }
    }

    /// The point `(0, …, 0, 1)`.
    pub fn basepoint(n: usize) -> Self {
        let mut coords = vec![T::zero(); n + 1];
        coords[n] = T::one();
        Self { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<T> {
        self.coords
    }

    /// Hyperbolic distance, via `2·asinh(‖x − y‖/2)` which stays accurate for
    /// nearby points.
    pub fn distance(&self, other: &Self) -> T {
        let d: Vec<T> = self.coords.iter().zip(&other.coords).map(|(&a, &b)| a - b).collect();
        let q = minkowski_dot(&d, &d).max(T::zero());
        T::lit(2.0) * (q.sqrt() / T::lit(2.0)).asinh()
    }
}

/// A point of `∂ℍⁿ = S^{n−1}`, stored as a Euclidean unit vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<T>", into = "Vec<T>")]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct IdealPoint<T> {
    coords: Vec<T>,
}

impl<T: Real> IdealPoint<T> {
    /// Accepts a vector whose norm is within `1e−6` of one and renormalizes it.
    pub fn new(coords: Vec<T>) -> Result<Self> {
        let r = norm(&coords);
        if coords.is_empty() || (r - T::one()).abs() > T::lit(1e-6) {
            return Err(Error::OutOfModel {
                model: "boundary sphere",
                detail: format!("norm {}", r.as_f64()),
            });
        }
        Ok(Self { coords: scaled(&coords, T::one() / r) })
    }

    /// Radial projection of any nonzero vector.
    pub fn from_direction(v: Vec<T>) -> Result<Self> {
        let r = norm(&v);
        if !(r > T::zero()) || !r.is_finite() {
            return Err(Error::OutOfModel {
                model: "boundary sphere",
                detail: "zero or non-finite direction".into(),
            });
        }
        Ok(Self { coords: scaled(&v, T::one() / r) })
    }

    /// Reads the boundary point represented by a future-pointing null (or
    /// nearly null) vector.
    pub fn from_null(v: &[T]) -> Result<Self> {
        let n = v.len() - 1;
        if !(v[n] > T::zero()) {
            return Err(Error::OutOfModel {
                model: "light cone",
                detail: "null vector is not future pointing".into(),
            });
        }
        Self::from_direction(v[..n].to_vec())
    }

    /// `e_i` in `S^{n−1}`.
    pub fn axis(n: usize, i: usize) -> Self {
        let mut coords = vec![T::zero(); n];
        coords[i] = T::one();
        Self { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<T> {
        self.coords
    }

    /// The null vector `(ξ, 1)`.
    pub fn null_lift(&self) -> Vec<T> {
        let mut v = self.coords.clone();
        v.push(T::one());
        v
    }

    /// Euclidean chord length to another boundary point.
    pub fn chord(&self, other: &Self) -> T {
        distance(&self.coords, &other.coords)
    }
}

impl<T: Real> TryFrom<Vec<T>> for SpacePoint<T> {
    type Error = Error;
    fn try_from(v: Vec<T>) -> Result<Self> {
        Self::new(v)
    }
}

impl<T: Real> From<SpacePoint<T>> for Vec<T> {
    fn from(p: SpacePoint<T>) -> Self {
        p.coords
    }
}

impl<T: Real> TryFrom<Vec<T>> for IdealPoint<T> {
    type Error = Error;
    fn try_from(v: Vec<T>) -> Result<Self> {
        Self::new(v)
    }
}

impl<T: Real> From<IdealPoint<T>> for Vec<T> {
    fn from(p: IdealPoint<T>) -> Self {
        p.coords
    }
}

/// A vertex of a straight simplex: either a point of ℍⁿ or of its boundary.
/// JSON: `{"finite": [..]}` or `{"ideal": [..]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub enum Vertex<T> {
    Finite(SpacePoint<T>),
    Ideal(IdealPoint<T>),
}

impl<T: Real> Vertex<T> {
    /// Minkowski representative: the point itself, or the null lift `(ξ, 1)`.
    pub fn lift(&self) -> Vec<T> {
        match self {
            Vertex::Finite(p) => p.coords().to_vec(),
            Vertex::Ideal(q) => q.null_lift(),
        }
    }

    /// Dimension `n` of the ambient ℍⁿ.
    pub fn dim(&self) -> usize {
        match self {
            Vertex::Finite(p) => p.dim(),
            Vertex::Ideal(q) => q.dim(),
        }
    }

    pub fn is_ideal(&self) -> bool {
        matches!(self, Vertex::Ideal(_))
    }
}

impl<T> From<SpacePoint<T>> for Vertex<T> {
    fn from(p: SpacePoint<T>) -> Self {
        Vertex::Finite(p)
    }
}

impl<T> From<IdealPoint<T>> for Vertex<T> {
    fn from(q: IdealPoint<T>) -> Self {
        Vertex::Ideal(q)
    }
}
