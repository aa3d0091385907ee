use serde::{Deserialize, Serialize};

use super::{volume, IdealSimplex, QuadConfig};
use crate::error::Result;
use crate::hypcore::IdealPoint;
use crate::linalg::{axpy, dot, norm, scaled};
use crate::scalar::Real;

/// Where a volume ascent stopped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct AscentResult<T> {
    pub simplex: IdealSimplex<T>,
    /// `|Vol_n|` at the final simplex.
    pub volume: T,
    pub sweeps: usize,
    /// Final step length (radians of arc per move).
    pub step: f64,
}

/// Orthonormal basis of the tangent space of `S^{n−1}` at `v`.
fn tangent_basis(v: &[f64]) -> Vec<Vec<f64>> {
    let n = v.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        axpy(&mut e, -v[i], v);
        for b in &basis {
            let c = dot(&e, b);
            axpy(&mut e, -c, b);
        }
        let r = norm(&e);
        if r > 1e-6 {
            basis.push(scaled(&e, 1.0 / r));
        }
        if basis.len() == n - 1 {
            break;
        }
    }
    basis
}

/// Compass search for a local maximum of `|Vol_n|`: every vertex is moved
/// along great circles in each tangent direction, a move is kept when it
/// increases the volume, and the step is halved after a sweep without
/// improvement. Stops when the step drops below `min_step` or after
/// `max_sweeps` sweeps.
pub fn ascend_volume<T: Real>(
    start: &IdealSimplex<T>,
    quad: &QuadConfig,
    min_step: f64,
    max_sweeps: usize,
) -> Result<AscentResult<T>> {
    let mut verts: Vec<Vec<f64>> =
        start.vertices().iter().map(|v| v.coords().iter().map(|x| x.as_f64()).collect()).collect();
    let eval = |vs: &[Vec<f64>]| -> Result<(IdealSimplex<T>, f64)> {
        let pts = vs
            .iter()
            .map(|v| IdealPoint::from_direction(v.iter().map(|&x| T::lit(x)).collect()))
            .collect::<Result<Vec<_>>>()?;
        let s = IdealSimplex::new(pts)?;
        let v = volume(&s, quad)?.value.as_f64().abs();
        Ok((s, v))
    };
    let (mut best_s, mut best) = eval(&verts)?;
    let mut step = 0.25;
    let mut sweeps = 0;
    while step >= min_step && sweeps < max_sweeps {
        sweeps += 1;
        let mut improved = false;
        for i in 0..verts.len() {
            for t in tangent_basis(&verts[i]) {
                for sgn in [1.0, -1.0] {
                    let mut trial = verts.clone();
                    let mut moved = scaled(&verts[i], step.cos());
                    axpy(&mut moved, sgn * step.sin(), &t);
                    trial[i] = moved;
                    let (s, v) = eval(&trial)?;
                    if v > best {
                        best = v;
                        best_s = s;
                        verts = trial;
                        improved = true;
                        break;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(AscentResult { simplex: best_s, volume: T::lit(best), sweeps, step })
}
