use serde::{Deserialize, Serialize};

use super::{minkowski_dot, IdealPoint, SpacePoint, Vertex};
use crate::error::{Error, Result};
use crate::linalg::{axpy, norm, scaled, Matrix};
use crate::scalar::Real;

/// An element of `O⁺(n,1) ≅ Isom(ℍⁿ)` together with its orientation
/// character `ε ∈ {+1, −1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Matrix<T>", into = "Matrix<T>")]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct Isometry<T> {
    matrix: Matrix<T>,
    sign: i8,
}

impl<T: Real> Isometry<T> {
    /// Validates a matrix, repairs small drift away from the Lorentz group and
    /// records `ε`.
    pub fn new(matrix: Matrix<T>) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() < 2 {
            return Err(Error::DimensionMismatch { expected: matrix.rows(), got: matrix.cols() });
        }
        let drift = lorentz_drift(&matrix);
        if !(drift <= T::lorentz_repair_tol()) {
            return Err(Error::NotLorentz { drift: drift.as_f64() });
        }
        let n = matrix.rows() - 1;
        let corner = matrix[(n, n)];
        if !(corner > T::zero()) {
            return Err(Error::TimeReversing { entry: corner.as_f64() });
        }
        let matrix = if drift > T::zero() { reorthogonalize(&matrix) } else { matrix };
        let sign = if matrix.determinant() < T::zero() { -1 } else { 1 };
        Ok(Self { matrix, sign })
    }

    /// Projects an approximately Lorentz matrix onto the group by
    /// Gram–Schmidt in the Minkowski form, however large the drift.
    pub fn nearest(matrix: Matrix<T>) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() < 2 {
            return Err(Error::DimensionMismatch { expected: matrix.rows(), got: matrix.cols() });
        }
        let fixed = reorthogonalize(&matrix);
        if fixed.sup_norm().is_nan() {
            return Err(Error::DegenerateConfiguration);
        }
        Self::new(fixed)
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: Matrix::identity(n + 1), sign: 1 }
    }

    /// Embeds an orthogonal `n × n` matrix as the stabilizer of the basepoint.
    pub fn from_rotation(rot: &Matrix<T>) -> Result<Self> {
        let n = rot.rows();
        let m = Matrix::from_fn(n + 1, n + 1, |i, j| match (i < n, j < n) {
            (true, true) => rot[(i, j)],
            (false, false) => T::one(),
            _ => T::zero(),
        });
        Self::new(m)
    }

    /// Pure translation (boost) carrying the basepoint to `p`.
    pub fn translation_to(p: &SpacePoint<T>) -> Self {
        let x = p.coords();
        let n = p.dim();
        let t = x[n];
        let m = Matrix::from_fn(n + 1, n + 1, |i, j| match (i < n, j < n) {
            (true, true) => {
                let d = if i == j { T::one() } else { T::zero() };
                d + x[i] * x[j] / (T::one() + t)
            }
            (true, false) => x[i],
            (false, true) => x[j],
            (false, false) => t,
        });
        Self { matrix: m, sign: 1 }
    }

    /// Translation by hyperbolic distance `dist` along the unit direction `dir`.
    pub fn boost(dir: &[T], dist: T) -> Result<Self> {
        let r = norm(dir);
        if !(r > T::zero()) {
            return Err(Error::InvalidInput("boost direction must be nonzero".into()));
        }
        let mut coords = scaled(dir, dist.sinh() / r);
        coords.push(dist.cosh());
        Ok(Self::translation_to(&SpacePoint::from_timelike_unchecked(coords)))
    }

    /// Dimension `n` of the ℍⁿ the isometry acts on.
    pub fn dim(&self) -> usize {
        self.matrix.rows() - 1
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    /// The orientation character `ε(g)`.
    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn is_orientation_preserving(&self) -> bool {
        self.sign > 0
    }

    /// `self ∘ other`. No drift repair; call [`Isometry::repaired`] on long
    /// products.
    pub fn compose(&self, other: &Self) -> Self {
        Self { matrix: self.matrix.mul(&other.matrix), sign: self.sign * other.sign }
    }

    /// Exact inverse `J Mᵀ J`.
    pub fn inverse(&self) -> Self {
        let n = self.dim();
        let m = Matrix::from_fn(n + 1, n + 1, |i, j| {
            let v = self.matrix[(j, i)];
            if (i == n) ^ (j == n) {
                -v
            } else {
                v
            }
        });
        Self { matrix: m, sign: self.sign }
    }

    /// Projects the matrix back onto the Lorentz group.
    pub fn repaired(&self) -> Self {
        Self { matrix: reorthogonalize(&self.matrix), sign: self.sign }
    }

    pub fn drift(&self) -> T {
        lorentz_drift(&self.matrix)
    }

    /// Sup-norm distance between matrices.
    pub fn distance(&self, other: &Self) -> T {
        self.matrix.max_abs_diff(&other.matrix)
    }

    pub fn act_vector(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.matrix.rows() {
            return Err(Error::DimensionMismatch { expected: self.matrix.rows(), got: v.len() });
        }
        Ok(self.matrix.mul_vec(v))
    }

    pub fn act_point(&self, x: &SpacePoint<T>) -> Result<SpacePoint<T>> {
        let v = self.act_vector(x.coords())?;
        Ok(SpacePoint::from_timelike_unchecked(v))
    }

    /// Boundary action: act on the null ray `(ξ, 1)` and renormalize.
    pub fn act_ideal(&self, xi: &IdealPoint<T>) -> Result<IdealPoint<T>> {
        if xi.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: xi.dim() });
        }
        let v = self.matrix.mul_vec(&xi.null_lift());
        IdealPoint::from_null(&v)
    }

    pub fn act_vertex(&self, v: &Vertex<T>) -> Result<Vertex<T>> {
        Ok(match v {
            Vertex::Finite(p) => Vertex::Finite(self.act_point(p)?),
            Vertex::Ideal(q) => Vertex::Ideal(self.act_ideal(q)?),
        })
    }
}

impl<T: Real> TryFrom<Matrix<T>> for Isometry<T> {
    type Error = Error;
    fn try_from(m: Matrix<T>) -> Result<Self> {
        Isometry::new(m)
    }
}

impl<T: Real> From<Isometry<T>> for Matrix<T> {
    fn from(g: Isometry<T>) -> Self {
        g.matrix
    }
}

/// `max |MᵀJM − J|`, relative to the size of the entries involved.
fn lorentz_drift<T: Real>(m: &Matrix<T>) -> T {
    let n = m.rows();
    let mut worst = T::zero();
    for i in 0..n {
        let ci = m.column(i);
        for j in i..n {
            let cj = m.column(j);
            let target = match (i == j, i == n - 1) {
                (true, true) => -T::one(),
                (true, false) => T::one(),
                _ => T::zero(),
            };
            let scale = T::one().max(norm(&ci) * norm(&cj));
            let dev = (minkowski_dot(&ci, &cj) - target).abs() / scale;
            worst = worst.max(dev);
        }
    }
    if worst.is_nan() {
        T::infinity()
    } else {
        worst
    }
}

/// Modified Gram–Schmidt on the columns with respect to the Minkowski form,
/// timelike column first.
fn reorthogonalize<T: Real>(m: &Matrix<T>) -> Matrix<T> {
    let n1 = m.rows();
    let order: Vec<usize> = std::iter::once(n1 - 1).chain(0..n1 - 1).collect();
    let mut done: Vec<(usize, Vec<T>)> = Vec::with_capacity(n1);
    for &j in &order {
        let mut c = m.column(j);
        for (k, u) in &done {
            let uu = if *k == n1 - 1 { -T::one() } else { T::one() };
            let coef = minkowski_dot(&c, u) / uu;
            axpy(&mut c, -coef, u);
        }
        let q = minkowski_dot(&c, &c).abs().sqrt();
        c = scaled(&c, T::one() / q);
        done.push((j, c));
    }
    let mut out = Matrix::zeros(n1, n1);
    for (j, c) in done {
        out.set_column(j, &c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(d: &[f64]) -> Matrix<f64> {
        Matrix::from_fn(d.len(), d.len(), |i, j| if i == j { d[i] } else { 0.0 })
    }

    #[test]
    fn identity_has_positive_sign() {
        let g = Isometry::new(Matrix::<f64>::identity(4)).unwrap();
        assert_eq!(g.sign(), 1);
    }

    #[test]
    fn coordinate_reflection_reverses_orientation() {
        let g = Isometry::new(diag(&[-1.0, 1.0, 1.0, 1.0])).unwrap();
        assert_eq!(g.sign(), -1);
    }

    #[test]
    fn product_of_two_coordinate_reflections_preserves_orientation() {
        let a = Isometry::new(diag(&[-1.0, 1.0, 1.0, 1.0])).unwrap();
        let b = Isometry::new(diag(&[1.0, -1.0, 1.0, 1.0])).unwrap();
        let ab = a.compose(&b);
        assert_eq!(ab.matrix().determinant(), 1.0);
        assert_eq!(ab.sign(), 1);
        assert_eq!(Isometry::new(ab.matrix().clone()).unwrap().sign(), 1);
    }

    #[test]
    fn rejects_non_lorentz_and_time_reversing() {
        let mut m = Matrix::<f64>::identity(3);
        m[(0, 0)] = 1.1;
        assert!(matches!(Isometry::new(m), Err(Error::NotLorentz { .. })));
        assert!(matches!(Isometry::new(diag(&[1.0, 1.0, -1.0])), Err(Error::TimeReversing { .. })));
    }

    #[test]
    fn small_drift_is_repaired() {
        let g = Isometry::<f64>::boost(&[1.0, 2.0, 0.5], 0.8).unwrap();
        let mut m = g.matrix().clone();
        m[(0, 1)] += 1e-10;
        let h = Isometry::new(m).unwrap();
        assert!(h.drift() < 1e-14);
        assert!(h.distance(&g) < 1e-8);
    }

    #[test]
    fn nearest_projects_large_drift() {
        let g = Isometry::<f64>::boost(&[0.2, 1.0, -0.5], 0.6).unwrap();
        let mut m = g.matrix().clone();
        m[(1, 2)] += 1e-3;
        assert!(matches!(Isometry::new(m.clone()), Err(Error::NotLorentz { .. })));
        let h = Isometry::nearest(m).unwrap();
        assert!(h.drift() < 1e-13);
        assert!(h.distance(&g) < 1e-2);
    }

    #[test]
    fn inverse_law_on_points_and_boundary() {
        let g = Isometry::<f64>::boost(&[0.3, -1.0, 0.2], 1.7).unwrap();
        let x = SpacePoint::from_timelike(vec![0.2, 0.1, -0.4, 1.5]).unwrap();
        let back = g.act_point(&g.inverse().act_point(&x).unwrap()).unwrap();
        assert!(back.distance(&x) < 1e-10);
        let xi = IdealPoint::from_direction(vec![1.0, 1.0, 1.0]).unwrap();
        let back = g.inverse().act_ideal(&g.act_ideal(&xi).unwrap()).unwrap();
        assert!(back.chord(&xi) < 1e-12);
    }

    #[test]
    fn reflection_fixes_orthogonal_boundary_point() {
        let r = Isometry::new(diag(&[1.0, -1.0, 1.0, 1.0])).unwrap();
        let e1 = IdealPoint::axis(3, 0);
        assert_eq!(r.act_ideal(&e1).unwrap(), e1);
    }

    #[test]
    fn translation_to_moves_basepoint() {
        let p = SpacePoint::from_timelike(vec![0.5, -0.25, 2.0]).unwrap();
        let g = Isometry::translation_to(&p);
        let o = SpacePoint::basepoint(2);
        assert!(g.act_point(&o).unwrap().distance(&p) < 1e-14);
        assert!(g.drift() < 1e-14);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let g = Isometry::<f64>::identity(3);
        let xi = IdealPoint::axis(2, 0);
        assert!(matches!(g.act_ideal(&xi), Err(Error::DimensionMismatch { .. })));
    }
}
