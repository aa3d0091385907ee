use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypcore::{IdealPoint, Isometry};
use crate::linalg::Matrix;
use crate::scalar::Real;

/// An ordered `(n+1)`-tuple of boundary points of ℍⁿ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<IdealPoint<T>>", into = "Vec<IdealPoint<T>>")]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct IdealSimplex<T> {
    vertices: Vec<IdealPoint<T>>,
}

impl<T: Real> IdealSimplex<T> {
    pub fn new(vertices: Vec<IdealPoint<T>>) -> Result<Self> {
        let Some(first) = vertices.first() else {
            return Err(Error::InvalidInput("simplex has no vertices".into()));
        };
        let n = first.dim();
        if n < 2 {
            return Err(Error::InvalidInput("ideal simplices need n ≥ 2".into()));
        }
        if let Some(bad) = vertices.iter().find(|v| v.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: bad.dim() });
        }
        if vertices.len() != n + 1 {
            return Err(Error::DimensionMismatch { expected: n + 1, got: vertices.len() });
        }
        Ok(Self { vertices })
    }

    /// Reads a simplex from plain coordinate arrays (each renormalized).
    pub fn from_coords(coords: Vec<Vec<T>>) -> Result<Self> {
        Self::new(coords.into_iter().map(IdealPoint::new).collect::<Result<_>>()?)
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[IdealPoint<T>] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &IdealPoint<T> {
        &self.vertices[i]
    }

    pub fn into_vertices(self) -> Vec<IdealPoint<T>> {
        self.vertices
    }

    /// `g·ξ` vertexwise.
    pub fn transformed(&self, g: &Isometry<T>) -> Result<Self> {
        let vertices = self.vertices.iter().map(|v| g.act_ideal(v)).collect::<Result<_>>()?;
        Ok(Self { vertices })
    }

    /// The simplex with vertices `i` and `j` exchanged.
    pub fn swapped(&self, i: usize, j: usize) -> Self {
        let mut vertices = self.vertices.clone();
        vertices.swap(i, j);
        Self { vertices }
    }

    /// First pair of vertices closer than `tol` on the sphere.
    pub fn coincident_pair(&self, tol: T) -> Option<(usize, usize)> {
        let m = self.vertices.len();
        for i in 0..m {
            for j in i + 1..m {
                if self.vertices[i].chord(&self.vertices[j]) < tol {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Determinant of the matrix whose rows are the null lifts `(ξᵢ, 1)`.
    pub fn lift_determinant(&self) -> T {
        let rows: Vec<Vec<T>> = self.vertices.iter().map(|v| v.null_lift()).collect();
        Matrix::from_rows(&rows).expect("square").determinant()
    }
}

impl<T: Real> TryFrom<Vec<IdealPoint<T>>> for IdealSimplex<T> {
    type Error = Error;
    fn try_from(v: Vec<IdealPoint<T>>) -> Result<Self> {
        Self::new(v)
    }
}

impl<T: Real> From<IdealSimplex<T>> for Vec<IdealPoint<T>> {
    fn from(s: IdealSimplex<T>) -> Self {
        s.vertices
    }
}

/// Orientation of the simplex: the sign of `det[(ξᵢ, 1)]`, or 0 when two
/// vertices coincide or all lie on the boundary sphere of one hyperplane.
///
/// An isometry multiplies each null lift by a positive factor and the matrix
/// by `g`, so the sign changes exactly by `ε(g)`.
pub fn orientation_sign<T: Real>(simplex: &IdealSimplex<T>) -> i8 {
    if simplex.coincident_pair(T::coincidence_tol()).is_some() {
        return 0;
    }
    let d = simplex.lift_determinant();
    // Rows have length √2, so Hadamard bounds |d| by 2^{(n+1)/2}.
    let scale = T::lit(2.0).powi(simplex.vertices.len() as i32 / 2);
    if d.abs() <= T::coincidence_tol() * scale {
        0
    } else if d > T::zero() {
        1
    } else {
        -1
    }
}

/// Largest deviation from 1 of the absolute cross-ratios
/// `|ξi−ξk||ξj−ξl| / (|ξi−ξl||ξj−ξk|)` over all vertex quadruples. These are
/// Möbius invariants, and all of them equal 1 exactly for regular simplices:
/// sending one vertex to ∞ turns the condition into equal Euclidean edge
/// lengths of the remaining `n` points.
pub fn regularity_deviation<T: Real>(simplex: &IdealSimplex<T>, tol: T) -> Result<T> {
    if let Some((i, j)) = simplex.coincident_pair(tol) {
        return Err(Error::DegenerateSimplex(i, j));
    }
    let v = simplex.vertices();
    let m = v.len();
    let chord: Vec<Vec<T>> = (0..m).map(|i| (0..m).map(|j| v[i].chord(&v[j])).collect()).collect();
    let mut worst = T::zero();
    for i in 0..m {
        for j in i + 1..m {
            for k in 0..m {
                if k == i || k == j {
                    continue;
                }
                for l in k + 1..m {
                    if l == i || l == j {
                        continue;
                    }
                    let r = chord[i][k] * chord[j][l] / (chord[i][l] * chord[j][k]);
                    worst = worst.max((r - T::one()).abs());
                }
            }
        }
    }
    Ok(worst)
}

/// Whether the simplex is congruent to the regular ideal simplex within `tol`.
pub fn is_regular<T: Real>(simplex: &IdealSimplex<T>, tol: T) -> Result<bool> {
    Ok(regularity_deviation(simplex, tol)? <= tol)
}
