use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{IdealPoint, SpacePoint};
use crate::error::{Error, Result};
use crate::linalg::{dot, scaled};
use crate::scalar::Real;

/// Coordinate charts of ℍⁿ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    /// `n + 1` coordinates on the upper sheet of `⟨x,x⟩ = −1`.
    Hyperboloid,
    /// Projective (Beltrami–Klein) ball, `n` coordinates.
    Klein,
    /// Conformal ball, `n` coordinates.
    Poincare,
    /// Upper half-space `{x : x_{n−1} > 0}`, `n` coordinates, height last.
    HalfSpace,
}

impl Model {
    pub const ALL: [Model; 4] = [Model::Hyperboloid, Model::Klein, Model::Poincare, Model::HalfSpace];

    pub fn name(self) -> &'static str {
        match self {
            Model::Hyperboloid => "hyperboloid",
            Model::Klein => "klein",
            Model::Poincare => "poincare",
            Model::HalfSpace => "half-space",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Model::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown model `{s}`")))
    }
}

/// Changes coordinates between two models of ℍⁿ.
pub fn convert<T: Real>(x: &[T], from: Model, to: Model) -> Result<Vec<T>> {
    let p = to_hyperboloid(x, from)?;
    Ok(match to {
        Model::Hyperboloid => p.into_coords(),
        Model::Klein => {
            let c = p.coords();
            let n = p.dim();
            scaled(&c[..n], T::one() / c[n])
        }
        Model::Poincare => hyperboloid_to_ball(&p),
        Model::HalfSpace => ball_to_half_space(&hyperboloid_to_ball(&p)),
    })
}

fn to_hyperboloid<T: Real>(x: &[T], from: Model) -> Result<SpacePoint<T>> {
    match from {
        Model::Hyperboloid => SpacePoint::new(x.to_vec()),
        Model::Klein => {
            let r2 = dot(x, x);
            if !(r2 < T::one()) {
                return Err(out_of("Klein ball", r2));
            }
            let mut v = x.to_vec();
            v.push(T::one());
            Ok(SpacePoint::from_timelike_unchecked(v))
        }
        Model::Poincare => ball_to_hyperboloid(x),
        Model::HalfSpace => {
            let n = x.len();
            if n == 0 || !(x[n - 1] > T::zero()) {
                return Err(Error::OutOfModel {
                    model: "upper half-space",
                    detail: "height must be positive".into(),
                });
            }
            ball_to_hyperboloid(&half_space_to_ball(x))
        }
    }
}

fn out_of<T: Real>(model: &'static str, r2: T) -> Error {
    Error::OutOfModel { model, detail: format!("squared norm {} ≥ 1", r2.as_f64()) }
}

/// Poincaré ball coordinates of a hyperboloid point, `x'/(1 + x_n)`.
pub fn hyperboloid_to_ball<T: Real>(p: &SpacePoint<T>) -> Vec<T> {
    let c = p.coords();
    let n = p.dim();
    scaled(&c[..n], T::one() / (T::one() + c[n]))
}

/// Inverse of [`hyperboloid_to_ball`]: `(2y, 1 + |y|²)/(1 − |y|²)`.
pub fn ball_to_hyperboloid<T: Real>(y: &[T]) -> Result<SpacePoint<T>> {
    let r2 = dot(y, y);
    if !(r2 < T::one()) {
        return Err(out_of("Poincaré ball", r2));
    }
    let d = T::one() - r2;
    let mut v = scaled(y, T::lit(2.0) / d);
    v.push((T::one() + r2) / d);
    Ok(SpacePoint::from_timelike_unchecked(v))
}

/// Cayley map from the ball to the half-space, sending the north pole `e_{n−1}`
/// to ∞ and the origin to `(0, …, 0, 1)`.
fn ball_to_half_space<T: Real>(y: &[T]) -> Vec<T> {
    let n = y.len();
    let r2 = dot(y, y);
    let mut dd = T::zero();
    for (i, &yi) in y.iter().enumerate() {
        let d = if i == n - 1 { yi - T::one() } else { yi };
        dd = dd + d * d;
    }
    let mut out = scaled(&y[..n - 1], T::lit(2.0) / dd);
    out.push((T::one() - r2) / dd);
    out
}

fn half_space_to_ball<T: Real>(x: &[T]) -> Vec<T> {
    let n = x.len();
    let h2 = dot(&x[..n - 1], &x[..n - 1]);
    let t = x[n - 1];
    let d = h2 + (t + T::one()) * (t + T::one());
    let mut out = scaled(&x[..n - 1], T::lit(2.0) / d);
    out.push((h2 + t * t - T::one()) / d);
    out
}

/// Stereographic projection of the boundary sphere onto `R^{n−1} ∪ {∞}`
/// from the north pole; `None` stands for ∞. Agrees with the boundary
/// values of the ball/half-space Cayley map.
pub fn sphere_to_half_space<T: Real>(xi: &IdealPoint<T>) -> Option<Vec<T>> {
    let c = xi.coords();
    let n = c.len();
    let den = T::one() - c[n - 1];
    if !(den > T::zero()) {
        return None;
    }
    Some(scaled(&c[..n - 1], T::one() / den))
}

/// Inverse of [`sphere_to_half_space`] on finite points; ∞ corresponds to
/// `IdealPoint::axis(n, n − 1)`.
pub fn half_space_to_sphere<T: Real>(z: &[T]) -> IdealPoint<T> {
    let r2 = dot(z, z);
    let d = r2 + T::one();
    let mut v = scaled(z, T::lit(2.0) / d);
    v.push((r2 - T::one()) / d);
    IdealPoint::from_direction(v).expect("stereographic image is a unit vector")
}
