//! Seeded random draws of rotations, isometries, points and boundary points.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{IdealPoint, Isometry, SpacePoint};
use crate::linalg::{axpy, dot, norm, scaled, Matrix};
use crate::scalar::Real;

/// Which component(s) of `Isom(ℍⁿ)` a random isometry is drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum OrientationChoice {
    /// `ε = +1`.
    #[default]
    Preserving,
    /// `ε = −1`.
    Reversing,
    /// Either component with probability 1/2.
    Any,
}

fn gaussian_vec<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Haar-distributed element of `O(n)` (Gram–Schmidt of a Gaussian matrix),
/// restricted to the requested determinant.
pub fn random_rotation<T: Real, R: Rng + ?Sized>(
    n: usize,
    orientation: OrientationChoice,
    rng: &mut R,
) -> Matrix<T> {
    loop {
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
        for _ in 0..n {
            let mut v = gaussian_vec(n, rng);
            for u in &cols {
                let c = dot(&v, u);
                axpy(&mut v, -c, u);
            }
            let r = norm(&v);
            if r < 1e-9 {
                break;
            }
            cols.push(scaled(&v, 1.0 / r));
        }
        if cols.len() < n {
            continue;
        }
        let mut q = Matrix::from_columns(&cols);
        let det = q.determinant();
        let flip = match orientation {
            OrientationChoice::Preserving => det < 0.0,
            OrientationChoice::Reversing => det > 0.0,
            OrientationChoice::Any => false,
        };
        if flip {
            let c0 = scaled(&q.column(0), -1.0);
            q.set_column(0, &c0);
        }
        return Matrix::from_fn(n, n, |i, j| T::lit(q[(i, j)]));
    }
}

/// Uniform point of the hyperbolic ball of radius `radius` about the basepoint
/// (radial density `∝ sinh^{n−1} r`).
pub fn random_point<T: Real, R: Rng + ?Sized>(n: usize, radius: f64, rng: &mut R) -> SpacePoint<T> {
    if radius <= 0.0 {
        return SpacePoint::basepoint(n);
    }
    let top = radius.sinh();
    let r = loop {
        let r = rng.random::<f64>() * radius;
        let accept = (r.sinh() / top).powi(n as i32 - 1);
        if rng.random::<f64>() < accept {
            break r;
        }
    };
    let dir = random_direction(n, rng);
    let mut coords: Vec<T> = dir.iter().map(|&d| T::lit(d * r.sinh())).collect();
    coords.push(T::lit(r.cosh()));
    SpacePoint::from_timelike_unchecked(coords)
}

fn random_direction<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v = gaussian_vec(n, rng);
        let r = norm(&v);
        if r > 1e-12 {
            return scaled(&v, 1.0 / r);
        }
    }
}

/// Uniform point of the boundary sphere `S^{n−1}`.
pub fn random_ideal_point<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> IdealPoint<T> {
    let v: Vec<T> = random_direction(n, rng).into_iter().map(T::lit).collect();
    IdealPoint::from_direction(v).expect("unit direction")
}

/// `translation_to(p) ∘ R` with `p` uniform in the hyperbolic ball of the
/// given radius and `R` Haar on the requested component of `O(n)`: the Haar
/// measure of `Isom(ℍⁿ)` restricted to the window `{g : d(o, g·o) ≤ radius}`.
pub fn random_isometry<T: Real, R: Rng + ?Sized>(
    n: usize,
    radius: f64,
    orientation: OrientationChoice,
    rng: &mut R,
) -> Isometry<T> {
    let p = random_point::<T, _>(n, radius, rng);
    let rot = random_rotation::<T, _>(n, orientation, rng);
    let r = Isometry::from_rotation(&rot).expect("orthogonal matrix embeds as an isometry");
    Isometry::translation_to(&p).compose(&r)
}
