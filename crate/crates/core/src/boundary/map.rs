use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypcore::{IdealPoint, Isometry};
use crate::linalg::{axpy, dot, Matrix};
use crate::scalar::Real;

/// JSON description of a boundary map, tagged by `kind`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MapSpec {
    /// Boundary action of an isometry.
    Planted { matrix: Matrix<f64> },
    /// `g·ξ` displaced by a smooth seeded field of sup norm `≤ amplitude`.
    Perturbed { matrix: Matrix<f64>, amplitude: f64, seed: u64 },
    /// Nearest-neighbour lookup in a sample table.
    Tabulated { samples: Vec<TableRow>, radius: f64 },
    /// Every point goes to `point`.
    Constant { point: Vec<f64> },
    /// `positive` on `{⟨ξ, axis⟩ ≥ 0}`, `negative` elsewhere.
    Piecewise { axis: Vec<f64>, positive: Matrix<f64>, negative: Matrix<f64> },
    /// `outer ∘ inner`.
    Composed { outer: Matrix<f64>, inner: Box<MapSpec> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub from: Vec<f64>,
    pub to: Vec<f64>,
}

/// One sine mode `c · sin(⟨ω, ξ⟩ + φ)` of a perturbation field.
#[derive(Clone, Debug, PartialEq)]
pub struct Mode<T> {
    freq: Vec<T>,
    phase: T,
    coef: Vec<T>,
}

const MODES: usize = 4;

/// An evaluatable map `∂ℍⁿ → ∂ℍⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryMap<T> {
    Planted(Isometry<T>),
    Perturbed { g: Isometry<T>, amplitude: T, seed: u64, modes: Vec<Mode<T>> },
    Tabulated { samples: Vec<(IdealPoint<T>, IdealPoint<T>)>, radius: T },
    Constant(IdealPoint<T>),
    Piecewise { axis: Vec<T>, positive: Isometry<T>, negative: Isometry<T> },
    Composed { outer: Isometry<T>, inner: Box<BoundaryMap<T>> },
}

fn isometry<T: Real>(m: &Matrix<f64>) -> Result<Isometry<T>> {
    Isometry::new(Matrix::from_fn(m.rows(), m.cols(), |i, j| T::lit(m[(i, j)])))
}

fn point<T: Real>(v: &[f64]) -> Result<IdealPoint<T>> {
    IdealPoint::new(v.iter().map(|&x| T::lit(x)).collect())
}

fn to_f64<T: Real>(g: &Isometry<T>) -> Matrix<f64> {
    let m = g.matrix();
    Matrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)].as_f64())
}

/// Builds an evaluatable map, validating every matrix and point.
pub fn make_boundary_map<T: Real>(spec: &MapSpec) -> Result<BoundaryMap<T>> {
    Ok(match spec {
        MapSpec::Planted { matrix } => BoundaryMap::Planted(isometry(matrix)?),
        MapSpec::Perturbed { matrix, amplitude, seed } => {
            let g: Isometry<T> = isometry(matrix)?;
            BoundaryMap::perturbed(g, T::lit(*amplitude), *seed)?
        }
        MapSpec::Tabulated { samples, radius } => {
            if samples.is_empty() {
                return Err(Error::InvalidInput("empty sample table".into()));
            }
            let samples =
                samples.iter().map(|r| Ok((point(&r.from)?, point(&r.to)?))).collect::<Result<Vec<_>>>()?;
            BoundaryMap::Tabulated { samples, radius: T::lit(*radius) }
        }
        MapSpec::Constant { point: p } => BoundaryMap::Constant(point(p)?),
        MapSpec::Piecewise { axis, positive, negative } => BoundaryMap::Piecewise {
            axis: axis.iter().map(|&x| T::lit(x)).collect(),
            positive: isometry(positive)?,
            negative: isometry(negative)?,
        },
        MapSpec::Composed { outer, inner } => {
            BoundaryMap::Composed { outer: isometry(outer)?, inner: Box::new(make_boundary_map(inner)?) }
        }
    })
}

impl<T: Real> BoundaryMap<T> {
    /// Seeded perturbation of the planted map of `g`; `amplitude = 0` gives
    /// exactly the planted map.
    pub fn perturbed(g: Isometry<T>, amplitude: T, seed: u64) -> Result<Self> {
        if !(amplitude >= T::zero()) {
            return Err(Error::InvalidInput("amplitude must be nonnegative".into()));
        }
        let n = g.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut modes: Vec<Mode<T>> = (0..MODES)
            .map(|_| {
                let freq = (0..n).map(|_| T::lit(3.0 * rng.sample::<f64, _>(StandardNormal))).collect();
                let phase = T::lit(rng.random::<f64>() * std::f64::consts::TAU);
                let coef: Vec<T> = (0..n).map(|_| T::lit(rng.sample::<f64, _>(StandardNormal))).collect();
                Mode { freq, phase, coef }
            })
            .collect();
        // Scale so that Σ |coef| = 1, hence |δ(ξ)| ≤ 1 everywhere.
        let total: T = modes.iter().map(|m| dot(&m.coef, &m.coef).sqrt()).sum();
        for m in &mut modes {
            m.coef.iter_mut().for_each(|c| *c = *c / total);
        }
        Ok(BoundaryMap::Perturbed { g, amplitude, seed, modes })
    }

    pub fn planted(g: Isometry<T>) -> Self {
        BoundaryMap::Planted(g)
    }

    /// `outer ∘ self`.
    pub fn post_composed(self, outer: Isometry<T>) -> Self {
        BoundaryMap::Composed { outer, inner: Box::new(self) }
    }

    /// Serializable description (matrices in `f64`).
    pub fn spec(&self) -> MapSpec {
        match self {
            BoundaryMap::Planted(g) => MapSpec::Planted { matrix: to_f64(g) },
            BoundaryMap::Perturbed { g, amplitude, seed, .. } => {
                MapSpec::Perturbed { matrix: to_f64(g), amplitude: amplitude.as_f64(), seed: *seed }
            }
            BoundaryMap::Tabulated { samples, radius } => MapSpec::Tabulated {
                samples: samples
                    .iter()
                    .map(|(a, b)| TableRow {
                        from: a.coords().iter().map(|x| x.as_f64()).collect(),
                        to: b.coords().iter().map(|x| x.as_f64()).collect(),
                    })
                    .collect(),
                radius: radius.as_f64(),
            },
            BoundaryMap::Constant(p) => {
                MapSpec::Constant { point: p.coords().iter().map(|x| x.as_f64()).collect() }
            }
            BoundaryMap::Piecewise { axis, positive, negative } => MapSpec::Piecewise {
                axis: axis.iter().map(|x| x.as_f64()).collect(),
                positive: to_f64(positive),
                negative: to_f64(negative),
            },
            BoundaryMap::Composed { outer, inner } => {
                MapSpec::Composed { outer: to_f64(outer), inner: Box::new(inner.spec()) }
            }
        }
    }
}

/// `φ(ξ)`.
pub fn eval_map<T: Real>(phi: &BoundaryMap<T>, xi: &IdealPoint<T>) -> Result<IdealPoint<T>> {
    match phi {
        BoundaryMap::Planted(g) => g.act_ideal(xi),
        BoundaryMap::Perturbed { g, amplitude, modes, .. } => {
            let eta = g.act_ideal(xi)?;
            if *amplitude == T::zero() {
                return Ok(eta);
            }
            let x = xi.coords();
            let mut delta = vec![T::zero(); x.len()];
            for m in modes {
                let s = (dot(&m.freq, x) + m.phase).sin();
                axpy(&mut delta, s * *amplitude, &m.coef);
            }
            // Tangential part only; the chord to g·ξ is then at most |δ|.
            let e = eta.coords();
            let radial = dot(&delta, e);
            axpy(&mut delta, -radial, e);
            let mut moved = e.to_vec();
            axpy(&mut moved, T::one(), &delta);
            IdealPoint::from_direction(moved)
        }
        BoundaryMap::Tabulated { samples, radius } => {
            let (best, dist) = samples
                .iter()
                .map(|(a, b)| (b, a.chord(xi)))
                .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap_or(std::cmp::Ordering::Equal))
                .expect("nonempty table");
            if dist > *radius {
                return Err(Error::OutOfTable { radius: radius.as_f64(), nearest: dist.as_f64() });
            }
            Ok(best.clone())
        }
        BoundaryMap::Constant(p) => Ok(p.clone()),
        BoundaryMap::Piecewise { axis, positive, negative } => {
            if dot(axis, xi.coords()) >= T::zero() {
                positive.act_ideal(xi)
            } else {
                negative.act_ideal(xi)
            }
        }
        BoundaryMap::Composed { outer, inner } => outer.act_ideal(&eval_map(inner, xi)?),
    }
}
