use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypcore::{IdealPoint, Isometry};
use crate::scalar::Real;

/// One atom of a boundary measure. JSON: `{"point": [..], "weight": w}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct Atom<T> {
    pub point: IdealPoint<T>,
    pub weight: T,
}

/// Finitely supported probability measure on `∂ℍⁿ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Atom<T>>", into = "Vec<Atom<T>>")]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct BoundaryMeasure<T> {
    atoms: Vec<Atom<T>>,
}

impl<T: Real> BoundaryMeasure<T> {
    /// Checks normalization, nonnegativity, dimensions and distinct support.
    pub fn new(atoms: Vec<Atom<T>>) -> Result<Self> {
        let Some(first) = atoms.first() else {
            return Err(Error::InvalidMeasure("no atoms".into()));
        };
        let n = first.point.dim();
        if atoms.iter().any(|a| a.point.dim() != n) {
            return Err(Error::InvalidMeasure("atoms of different dimensions".into()));
        }
        if let Some(a) = atoms.iter().find(|a| !(a.weight >= T::zero())) {
            return Err(Error::InvalidMeasure(format!("negative weight {}", a.weight.as_f64())));
        }
        let total: T = atoms.iter().map(|a| a.weight).sum();
        if !((total - T::one()).abs() <= T::coincidence_tol()) {
            return Err(Error::InvalidMeasure(format!("total mass {}", total.as_f64())));
        }
        for i in 0..atoms.len() {
            for j in i + 1..atoms.len() {
                if atoms[i].point.chord(&atoms[j].point) < T::coincidence_tol() {
                    return Err(Error::InvalidMeasure(format!("atoms {i} and {j} coincide")));
                }
            }
        }
        Ok(Self { atoms })
    }

    /// Equal weights on the given points.
    pub fn uniform(points: Vec<IdealPoint<T>>) -> Result<Self> {
        let w = T::one() / T::from_usize_lossy(points.len().max(1));
        Self::new(points.into_iter().map(|point| Atom { point, weight: w }).collect())
    }

    pub fn atoms(&self) -> &[Atom<T>] {
        &self.atoms
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].point.dim()
    }

    /// Push-forward `g_*μ`.
    pub fn pushforward(&self, g: &Isometry<T>) -> Result<Self> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Ok(Atom { point: g.act_ideal(&a.point)?, weight: a.weight }))
            .collect::<Result<_>>()?;
        Ok(Self { atoms })
    }
}

impl<T: Real> TryFrom<Vec<Atom<T>>> for BoundaryMeasure<T> {
    type Error = Error;
    fn try_from(atoms: Vec<Atom<T>>) -> Result<Self> {
        Self::new(atoms)
    }
}

impl<T: Real> From<BoundaryMeasure<T>> for Vec<Atom<T>> {
    fn from(m: BoundaryMeasure<T>) -> Self {
        m.atoms
    }
}

/// The atom of mass `≥ 1/2`, when there is exactly one such atom.
pub fn dominant_atom<T: Real>(mu: &BoundaryMeasure<T>) -> Option<IdealPoint<T>> {
    let half = T::lit(0.5);
    let mut heavy = mu.atoms.iter().filter(|a| a.weight >= half);
    match (heavy.next(), heavy.next()) {
        (Some(a), None) => Some(a.point.clone()),
        _ => None,
    }
}
