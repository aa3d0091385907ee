use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::preset::{standard_cell, LatticePreset};
use crate::error::{Error, Result};
use crate::hypcore::{
    convert, minkowski_dot, random::random_rotation, random::OrientationChoice, Isometry, Model,
};
use crate::linalg::{axpy, dot, Matrix};
use crate::scalar::Real;
use crate::volcocycle::v_n;

/// Samples per independent random stream.
pub const BATCH_SIZE: usize = 4096;

/// Target of [`default_truncation`] for [`truncation_error_bound`].
pub const DEFAULT_BIAS: f64 = 1e-3;

/// One draw from the invariant probability measure on `Γ\G`.
#[derive(Clone, Debug, PartialEq)]
pub struct HaarSample<T> {
    pub g: Isometry<T>,
    /// Importance weight; its mean over a batch estimates the fraction of
    /// `Γ\G` kept by the truncation. Zero for draws that land in the
    /// truncation horoball of another vertex of the cell.
    pub weight: T,
    pub cell: usize,
}

/// Draws base points cell by cell in the half-space chart that sends vertex 0
/// to ∞ and the opposite face onto a regular simplex `D` inscribed in the unit
/// sphere of `R^{n−1}`.
///
/// The horizontal position is uniform over the `n!` pieces of the barycentric
/// subdivision of `D`, each parametrised by Duffy coordinates collapsed at its
/// vertex of `D` with a squared radial variable; the height is drawn with
/// density `∝ t^{−n}` between the dome `√(1 − |x|²)` and `T`. Importance
/// weights are then bounded because the column volume blows up exactly where
/// the Duffy Jacobian vanishes.
pub struct HaarSampler<'a, T> {
    preset: &'a LatticePreset<T>,
    truncation: T,
    /// Pieces of the subdivision as `(a₀, [aₖ − a₀], |det|)`.
    pieces: Vec<(Vec<T>, Vec<Vec<T>>, T)>,
    charts_inv: Vec<Isometry<T>>,
    scale: T,
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// Vertices of `D` in `R^{n−1}`.
fn cross_section(n: usize) -> Vec<Vec<f64>> {
    standard_cell(n).vertices()[1..].iter().map(|v| v.coords()[..n - 1].to_vec()).collect()
}

/// Euclidean volume of `D`.
fn cross_section_volume(n: usize) -> f64 {
    let p = cross_section(n);
    let d = n - 1;
    let m = Matrix::from_fn(d, d, |i, j| p[j + 1][i] - p[0][i]);
    m.determinant().abs() / factorial(d)
}

/// Hyperbolic volume of `Γ\ℍⁿ` above height `T` in all the cusps: each of
/// the `n + 1` vertices of each cell contributes `|D| T^{1−n}/(n−1)`.
fn cusp_volume<T: Real>(preset: &LatticePreset<T>, truncation: f64) -> f64 {
    let n = preset.n;
    let per_vertex = cross_section_volume(n) * truncation.powi(1 - n as i32) / (n - 1) as f64;
    per_vertex * (preset.cells.len() * (n + 1)) as f64
}

/// `v_n · (cusp volume above T) / covolume`: the bias of any smearing
/// estimate caused by the truncation, since the integrand is bounded by `v_n`.
pub fn truncation_error_bound<T: Real>(preset: &LatticePreset<T>, truncation: f64) -> f64 {
    let vn = v_n(preset.n).expect("verified presets have a tabulated v_n").value;
    vn * cusp_volume(preset, truncation) / preset.covolume()
}

/// Smallest height above the cusp floor whose truncation bias is at most 1e−3.
pub fn default_truncation<T: Real>(preset: &LatticePreset<T>) -> f64 {
    let n = preset.n;
    let at_one = truncation_error_bound(preset, 1.0);
    let t = (at_one / DEFAULT_BIAS).powf(1.0 / (n - 1) as f64);
    t.max(preset.floor() * (1.0 + 1e-9))
}

impl<'a, T: Real> HaarSampler<'a, T> {
    pub fn new(preset: &'a LatticePreset<T>, truncation: f64) -> Result<Self> {
        let floor = preset.floor();
        if !(truncation > floor) {
            return Err(Error::BadTruncation { height: truncation, floor });
        }
        let n = preset.n;
        let d = n - 1;
        let p = cross_section(n);
        let mut pieces = Vec::new();
        for perm in permutations(n) {
            // Vertex k of the piece is the barycentre of p[perm[0..=k]].
            let chain: Vec<Vec<f64>> = (0..n)
                .map(|k| {
                    let mut c = vec![0.0; d];
                    for &i in &perm[..=k] {
                        axpy(&mut c, 1.0 / (k + 1) as f64, &p[i]);
                    }
                    c
                })
                .collect();
            let edges: Vec<Vec<f64>> =
                chain[1..].iter().map(|c| c.iter().zip(&chain[0]).map(|(a, b)| a - b).collect()).collect();
            let det = if d == 0 { 1.0 } else { Matrix::from_columns(&edges).determinant().abs() };
            let lit = |v: &Vec<f64>| v.iter().map(|&x| T::lit(x)).collect::<Vec<T>>();
            pieces.push((lit(&chain[0]), edges.iter().map(lit).collect(), T::lit(det)));
        }
        let scale = (preset.cells.len() as f64) * factorial(n) / preset.covolume();
        Ok(Self {
            preset,
            truncation: T::lit(truncation),
            pieces,
            charts_inv: preset.charts.iter().map(|row| row[0].inverse()).collect(),
            scale: T::lit(scale),
        })
    }

    /// Expected weight: the fraction of `Γ\G` below the truncation height.
    pub fn kept_fraction(&self) -> f64 {
        1.0 - cusp_volume(self.preset, self.truncation.as_f64()) / self.preset.covolume()
    }

    pub fn truncation(&self) -> f64 {
        self.truncation.as_f64()
    }

    /// Batch `b` of the stream for `seed`, truncated to `len` samples. Batches
    /// use disjoint ChaCha streams, so any split of the index range gives
    /// independent, reproducible draws.
    pub fn batch(&self, seed: u64, b: u64, len: usize) -> Vec<HaarSample<T>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(b);
        (0..len).map(|_| self.draw(&mut rng)).collect()
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> HaarSample<T> {
        let n = self.preset.n;
        let d = n - 1;
        let one = T::one();
        let cell = rng.random_range(0..self.preset.cells.len());
        let (a0, edges, det) = &self.pieces[rng.random_range(0..self.pieces.len())];
        let s = T::lit(1.0 - rng.random::<f64>());
        let rho = s * s;
        let mut x = a0.clone();
        let mut jac = *det * T::lit(2.0) * s * rho.powi(d as i32 - 1);
        let mut remaining = one;
        for (k, e) in edges.iter().enumerate() {
            let y = if k + 1 < d {
                let u = T::lit(rng.random::<f64>());
                let y = remaining * (one - u);
                jac = jac * u.powi((d - 2 - k) as i32);
                remaining = remaining * u;
                y
            } else {
                remaining
            };
            axpy(&mut x, rho * y, e);
        }
        let h = (one - dot(&x, &x)).max(T::zero()).sqrt();
        let p = one - T::from_usize_lossy(n);
        let top = h.powf(p);
        let bottom = self.truncation.powf(p);
        let u = T::lit(rng.random::<f64>());
        let t = (top - u * (top - bottom)).powf(one / p);
        let colvol = (top - bottom) / -p;
        let mut chart = x;
        chart.push(t);
        let rot = random_rotation::<T, _>(n, OrientationChoice::Any, rng);
        let mut weight = self.scale * jac * colvol;
        let base = convert(&chart, Model::HalfSpace, Model::Hyperboloid)
            .and_then(|q| self.charts_inv[cell].act_vector(&q))
            .ok();
        let Some(base) = base.filter(|b| b.iter().all(|c| c.is_finite())) else {
            return HaarSample { g: Isometry::identity(n), weight: T::zero(), cell };
        };
        let limit = one / self.truncation;
        if self.preset.horo[cell][1..].iter().any(|l| -minkowski_dot(&base, l) < limit) {
            weight = T::zero();
        }
        let point = crate::hypcore::SpacePoint::from_timelike_unchecked(base);
        let r = Isometry::from_rotation(&rot).expect("orthogonal matrix");
        HaarSample { g: Isometry::translation_to(&point).compose(&r), weight, cell }
    }
}

/// `count` samples for `seed` at truncation height `truncation`, drawn in
/// parallel batches of [`BATCH_SIZE`] and returned in stream order.
pub fn sample_haar<T: Real>(
    preset: &LatticePreset<T>,
    seed: u64,
    count: usize,
    truncation: f64,
) -> Result<Vec<HaarSample<T>>> {
    let sampler = HaarSampler::new(preset, truncation)?;
    let batches = count.div_ceil(BATCH_SIZE);
    let parts: Vec<Vec<HaarSample<T>>> = (0..batches)
        .into_par_iter()
        .map(|b| sampler.batch(seed, b as u64, BATCH_SIZE.min(count - b * BATCH_SIZE)))
        .collect();
    Ok(parts.into_iter().flatten().collect())
}
