use serde::{Deserialize, Serialize};

use super::{apply_form, minkowski_dot, Isometry, Vertex};
use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, Matrix};
use crate::scalar::Real;

/// A totally geodesic hyperplane, represented by its unit spacelike normal
/// `u` (`⟨u,u⟩ = 1`); the hyperplane is `{x : ⟨x,u⟩ = 0}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Hyperplane<T> {
    normal: Vec<T>,
}

impl<T: Real> Hyperplane<T> {
    pub fn new(normal: Vec<T>) -> Result<Self> {
        let q = minkowski_dot(&normal, &normal);
        if !(q > T::zero()) {
            return Err(Error::InvalidInput(format!(
                "hyperplane normal must be spacelike (⟨u,u⟩ = {})",
                q.as_f64()
            )));
        }
        let s = T::one() / q.sqrt();
        Ok(Self { normal: normal.into_iter().map(|x| x * s).collect() })
    }

    pub fn normal(&self) -> &[T] {
        &self.normal
    }

    pub fn dim(&self) -> usize {
        self.normal.len() - 1
    }

    /// `⟨x̂, u⟩` for the Minkowski representative of `v`; zero on the hyperplane,
    /// the sign tells the side.
    pub fn evaluate(&self, v: &Vertex<T>) -> T {
        minkowski_dot(&v.lift(), &self.normal)
    }
}

/// A hyperplane containing every given point (ideal points on its boundary).
///
/// The normal is spacelike and Minkowski-orthogonal to every lift. When the
/// points do not pin it down, the choice is: the first standard basis vector
/// whose projection onto the admissible subspace carries at least half of the
/// largest projected Minkowski norm, normalized, with its first nonzero
/// coordinate positive.
pub fn hyperplane_through<T: Real>(points: &[Vertex<T>]) -> Result<Hyperplane<T>> {
    let Some(first) = points.first() else {
        return Err(Error::InvalidInput("need at least one point".into()));
    };
    let n = first.dim();
    if let Some(bad) = points.iter().find(|p| p.dim() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: bad.dim() });
    }
    if points.len() > n {
        return Err(Error::TooManyPoints { max: n, got: points.len() });
    }
    let rows: Vec<Vec<T>> = points.iter().map(|p| apply_form(&p.lift())).collect();
    let a = Matrix::from_rows(&rows).expect("uniform row length");
    let (rank, basis) = a.null_space(T::lit(1e-10));
    if rank < points.len() {
        return Err(Error::DegenerateConfiguration);
    }
    let projections: Vec<Vec<T>> = (0..=n)
        .map(|j| {
            let mut w = vec![T::zero(); n + 1];
            for b in &basis {
                axpy(&mut w, b[j], b);
            }
            w
        })
        .collect();
    let norms: Vec<T> = projections.iter().map(|w| minkowski_dot(w, w)).collect();
    let best = norms.iter().fold(T::zero(), |m, &q| m.max(q));
    if !(best > T::lit(1e-12)) {
        return Err(Error::DegenerateConfiguration);
    }
    let pick = norms.iter().position(|&q| q >= best * T::lit(0.5)).expect("maximum exists");
    let mut u = projections[pick].clone();
    let s = T::one() / norms[pick].sqrt();
    u.iter_mut().for_each(|x| *x = *x * s);
    let lead = u.iter().copied().find(|x| x.abs() > T::lit(1e-12)).unwrap_or(T::one());
    if lead < T::zero() {
        u.iter_mut().for_each(|x| *x = -*x);
    }
    debug_assert!(rows.iter().all(|r| dot(r, &u).abs() < T::lit(1e-6)));
    Hyperplane::new(u)
}

/// The Lorentz reflection `x ↦ x − 2⟨x,u⟩u` in a hyperplane.
pub fn reflect_in<T: Real>(h: &Hyperplane<T>) -> Isometry<T> {
    let u = h.normal();
    let ju = apply_form(u);
    let n1 = u.len();
    let m = Matrix::from_fn(n1, n1, |i, j| {
        let d = if i == j { T::one() } else { T::zero() };
        d - T::lit(2.0) * u[i] * ju[j]
    });
    Isometry::new(m).expect("Lorentz reflection of a unit spacelike normal")
}
