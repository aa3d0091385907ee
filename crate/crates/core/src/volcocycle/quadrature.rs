use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{orientation_sign, IdealSimplex, VolumeMethod, VolumeResult};
use crate::error::{Error, Result};
use crate::hypcore::{IdealPoint, Isometry, SpacePoint};
use crate::linalg::{axpy, dot, norm, scaled, sub, Matrix};
use crate::scalar::Real;

/// Settings of the adaptive cubature behind [`voln`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadConfig {
    /// Gauss–Legendre order of the accepted rule; the error estimate compares
    /// it with the rule of order `order − 2`.
    pub order: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Total integrand evaluations allowed across all pieces.
    pub max_evals: usize,
    /// Every cube starts split into `initial_splits` slabs per axis.
    pub initial_splits: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { order: 8, rel_tol: 1e-9, abs_tol: 1e-12, max_evals: 50_000_000, initial_splits: 1 }
    }
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = m as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                let (mut q0, mut q1) = (1.0, z);
                for k in 2..=m {
                    let q2 = ((2 * k - 1) as f64 * z * q1 - (k - 1) as f64 * q0) / k as f64;
                    q0 = q1;
                    q1 = q2;
                }
                let dq = m as f64 * (z * q1 - q0) / (z * z - 1.0);
                w[i] = 1.0 / ((1.0 - z * z) * dq * dq);
                break;
            }
        }
        x[i] = 0.5 * (1.0 - z);
    }
    (x, w)
}

struct Rule<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
    /// Legendre polynomials of degree `m − 1` and `m − 2` at the nodes.
    tails: [Vec<T>; 2],
}

/// Shifted Legendre polynomial `P_deg(2x − 1)`.
fn legendre(deg: usize, x: f64) -> f64 {
    let z = 2.0 * x - 1.0;
    let (mut p0, mut p1) = (1.0, z);
    if deg == 0 {
        return 1.0;
    }
    for k in 2..=deg {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    p1
}

impl<T: Real> Rule<T> {
    fn new(m: usize) -> Self {
        let (x, w) = gauss_legendre(m);
        let tail =
            |deg: usize| x.iter().map(|&xi| T::lit((2 * deg + 1) as f64 * legendre(deg, xi))).collect();
        Self {
            nodes: x.iter().copied().map(T::lit).collect(),
            weights: w.into_iter().map(T::lit).collect(),
            tails: [tail(m - 1), tail(m - 2)],
        }
    }

    /// Tensor rule over the box `[lo, lo + width]`. With `indicators`, also
    /// returns per axis the size of the two highest Legendre coefficients
    /// along that axis, which locates where the integrand is least resolved.
    fn apply(&self, lo: &[T], width: &[T], f: &impl Fn(&[T]) -> T, indicators: bool) -> (T, Vec<T>) {
        let d = lo.len();
        let m = self.nodes.len();
        let mut idx = vec![0usize; d];
        let mut u = vec![T::zero(); d];
        let mut total = T::zero();
        let mut tails = vec![[T::zero(); 2]; if indicators { d } else { 0 }];
        let volume = width.iter().fold(T::one(), |acc, &w| acc * w);
        loop {
            let mut w = T::one();
            for k in 0..d {
                u[k] = lo[k] + width[k] * self.nodes[idx[k]];
                w = w * self.weights[idx[k]];
            }
            let wf = w * f(&u);
            total = total + wf;
            for (k, t) in tails.iter_mut().enumerate() {
                t[0] = t[0] + wf * self.tails[0][idx[k]];
                t[1] = t[1] + wf * self.tails[1][idx[k]];
            }
            let mut k = 0;
            loop {
                if k == d {
                    let ind = tails.iter().map(|t| (t[0].abs() + t[1].abs()) * volume).collect();
                    return (total * volume, ind);
                }
                idx[k] += 1;
                if idx[k] < m {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }
}

struct Cell<T> {
    lo: Vec<T>,
    width: Vec<T>,
    value: T,
    error: T,
    axis: usize,
}

/// Adaptive cubature of `f` over `[0,1]^d`. The cell with the largest
/// `|Q_hi − Q_lo|` is halved along the axis where its Legendre tail is
/// largest, so refinement toward a near-singular face stays one-dimensional.
fn integrate_cube<T: Real>(
    d: usize,
    f: impl Fn(&[T]) -> T,
    cfg: &QuadConfig,
    abs_target: T,
    budget: usize,
) -> Result<(T, T, usize)> {
    let hi = Rule::<T>::new(cfg.order.max(3));
    let lo = Rule::<T>::new(cfg.order.max(3) - 2);
    let per_cell = hi.nodes.len().pow(d as u32) + lo.nodes.len().pow(d as u32);
    let mut evals = 0usize;
    let eval_cell = |lo_c: Vec<T>, width: Vec<T>, evals: &mut usize| {
        *evals += per_cell;
        let (a, ind) = hi.apply(&lo_c, &width, &f, true);
        let (b, _) = lo.apply(&lo_c, &width, &f, false);
        let axis = (0..d).max_by(|&x, &y| ind[x].partial_cmp(&ind[y]).unwrap_or(std::cmp::Ordering::Equal));
        Cell { lo: lo_c, width, value: a, error: (a - b).abs(), axis: axis.unwrap_or(0) }
    };
    let k = cfg.initial_splits.max(1);
    let width = T::one() / T::from_usize_lossy(k);
    let mut cells = Vec::new();
    for flat in 0..k.pow(d as u32) {
        let mut rem = flat;
        let corner: Vec<T> = (0..d)
            .map(|_| {
                let c = rem % k;
                rem /= k;
                T::from_usize_lossy(c) * width
            })
            .collect();
        cells.push(eval_cell(corner, vec![width; d], &mut evals));
    }
    let rel = T::lit(cfg.rel_tol);
    loop {
        let value: T = cells.iter().map(|c| c.value).sum();
        let error: T = cells.iter().map(|c| c.error).sum();
        if error <= abs_target.max(rel * value.abs()) {
            return Ok((value, error, evals));
        }
        if evals + 2 * per_cell > budget {
            return Err(Error::QuadratureBudgetExceeded { max_evals: cfg.max_evals, error: error.as_f64() });
        }
        let worst = (0..cells.len())
            .max_by(|&a, &b| cells[a].error.partial_cmp(&cells[b].error).unwrap())
            .expect("nonempty");
        let cell = cells.swap_remove(worst);
        let mut width = cell.width.clone();
        width[cell.axis] = width[cell.axis] / T::lit(2.0);
        let mut upper = cell.lo.clone();
        upper[cell.axis] = upper[cell.axis] + width[cell.axis];
        cells.push(eval_cell(cell.lo, width.clone(), &mut evals));
        cells.push(eval_cell(upper, width, &mut evals));
    }
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for k in 0..m {
        let mut next = Vec::with_capacity(out.len() * (k + 1));
        for p in &out {
            for pos in 0..=k {
                let mut q = p.clone();
                q.insert(pos, k);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Largest dimension accepted by the quadrature path (`n!` pieces).
pub const MAX_QUADRATURE_DIM: usize = 8;

/// Signed volume of an ideal simplex in any dimension `n ≥ 2` by cubature.
///
/// The simplex is first centred (the normalized sum of its null lifts is moved
/// to the basepoint), then vertex 0 is sent to ∞ of the upper half-space. The
/// other vertices span a Euclidean simplex `D ⊂ R^{n−1}` inscribed in a sphere
/// `|x − c| = R`, and the volume is `1/(n−1) ∫_D (R² − |x−c|²)^{−(n−1)/2} dx`,
/// the height integral `∫ dt/tⁿ` having been done analytically. `D` is cut
/// into its `n!` barycentric pieces, each containing one singular vertex; a
/// Duffy map with the radial variable squared makes every piece smooth.
pub fn voln<T: Real>(s: &IdealSimplex<T>, cfg: &QuadConfig) -> Result<VolumeResult<T>> {
    let n = s.dim();
    if n > MAX_QUADRATURE_DIM {
        return Err(Error::InvalidInput(format!("quadrature supports n ≤ {MAX_QUADRATURE_DIM}, got {n}")));
    }
    let sign = orientation_sign(s);
    if sign == 0 {
        return Ok(VolumeResult { value: T::zero(), abs_error: T::zero(), method: VolumeMethod::Quadrature });
    }
    let (points, center) = half_space_picture(s)?;
    let d = n - 1;
    let perms = permutations(n);
    let budget = (cfg.max_evals / perms.len()).max(1);
    let target = T::lit(cfg.abs_tol) / T::from_usize_lossy(perms.len());
    let power = T::lit(d as f64 / 2.0);
    let norm = T::one() / T::from_usize_lossy(d);
    let pieces: Vec<Result<(T, T, usize)>> = perms
        .par_iter()
        .map(|perm| {
            // Chain p_0 (a vertex of D), p_1 (an edge midpoint), …, p_d (barycentre).
            let mut chain: Vec<Vec<T>> = Vec::with_capacity(n);
            let mut acc = vec![T::zero(); d];
            for (k, &i) in perm.iter().enumerate() {
                axpy(&mut acc, T::one(), &points[i]);
                chain.push(scaled(&acc, T::one() / T::from_usize_lossy(k + 1)));
            }
            let steps: Vec<Vec<T>> = (1..n).map(|k| sub(&chain[k], &chain[k - 1])).collect();
            let jac = Matrix::from_columns(&steps).determinant().abs();
            let p0c = sub(&chain[0], &center);
            let f = |u: &[T]| {
                // u[0] = s with radial Duffy variable s².
                let s = u[0];
                let mut w = vec![T::zero(); d];
                // x = p0 + u1 v1 + u1u2 v2 + …, Jacobian |det V| u1^{d−1} u2^{d−2} ⋯
                // times 2s from u1 = s².
                let mut scale = s * s;
                let mut j = jac * T::lit(2.0) * s * scale.powi(d as i32 - 1);
                for (k, step) in steps.iter().enumerate() {
                    if k > 0 {
                        scale = scale * u[k];
                        j = j * u[k].powi((d - 1 - k) as i32);
                    }
                    axpy(&mut w, scale, step);
                }
                // R² − |x − c|² with x = p0 + w, using |p0 − c|² = R².
                let gap = -(T::lit(2.0) * dot(&p0c, &w) + dot(&w, &w));
                if !(gap > T::zero()) || j == T::zero() {
                    return T::zero();
                }
                norm * j / gap.powf(power)
            };
            integrate_cube(d, f, cfg, target, budget)
        })
        .collect();
    let mut value = T::zero();
    let mut error = T::zero();
    for piece in pieces {
        let (v, e, _) = piece?;
        value = value + v;
        error = error + e;
    }
    Ok(VolumeResult {
        value: value * T::lit(sign as f64),
        abs_error: error,
        method: VolumeMethod::Quadrature,
    })
}

/// Centres the simplex and picks the vertex sent to ∞ (see [`link_quality`]);
/// returns the stereographic images of the remaining vertices with their
/// circumcentre.
fn half_space_picture<T: Real>(s: &IdealSimplex<T>) -> Result<(Vec<Vec<T>>, Vec<T>)> {
    let n = s.dim();
    let mut sum = vec![T::zero(); n + 1];
    for v in s.vertices() {
        axpy(&mut sum, T::one(), &v.null_lift());
    }
    let centre = SpacePoint::from_timelike(sum)?;
    let back = Isometry::translation_to(&centre).inverse();
    let moved: Vec<IdealPoint<T>> = s.vertices().iter().map(|v| back.act_ideal(v)).collect::<Result<_>>()?;
    let mut best: Option<(T, Vec<Vec<T>>, Vec<T>)> = None;
    for apex in 0..=n {
        let Some((points, center)) = picture_from(&moved, apex) else { continue };
        let q = link_quality(&points, &center);
        if best.as_ref().is_none_or(|b| q > b.0) {
            best = Some((q, points, center));
        }
    }
    best.map(|(_, p, c)| (p, c)).ok_or(Error::DegenerateConfiguration)
}

/// Shortest edge of `D` over its circumdiameter. A short chord runs close to
/// the sphere, where the integrand blows up, so larger is easier.
fn link_quality<T: Real>(points: &[Vec<T>], center: &[T]) -> T {
    let r = norm(&sub(&points[0], center));
    let mut shortest = T::infinity();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            shortest = shortest.min(norm(&sub(&points[i], &points[j])));
        }
    }
    shortest / (T::lit(2.0) * r)
}

/// Sends `moved[apex]` to ∞ and projects the others.
fn picture_from<T: Real>(moved: &[IdealPoint<T>], apex: usize) -> Option<(Vec<Vec<T>>, Vec<T>)> {
    let n = moved[0].dim();
    // Householder reflection taking the apex to the north pole e_{n−1}.
    let mut h = moved[apex].coords().to_vec();
    h[n - 1] = h[n - 1] - T::one();
    let hh = dot(&h, &h);
    let points: Vec<Vec<T>> = moved
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != apex)
        .map(|(_, v)| {
            let mut y = v.coords().to_vec();
            if hh > T::zero() {
                let c = T::lit(2.0) * dot(&y, &h) / hh;
                axpy(&mut y, -c, &h);
            }
            let den = T::one() - y[n - 1];
            scaled(&y[..n - 1], T::one() / den)
        })
        .collect();
    let rows: Vec<Vec<T>> = (1..n).map(|i| scaled(&sub(&points[i], &points[0]), T::lit(2.0))).collect();
    let rhs: Vec<T> = (1..n).map(|i| dot(&points[i], &points[i]) - dot(&points[0], &points[0])).collect();
    let a = Matrix::from_rows(&rows).expect("square");
    let center = a.solve(&rhs)?;
    Some((points, center))
}
