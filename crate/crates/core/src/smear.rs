//! Monte-Carlo smearing of the volume cocycle over `Γ\G`, the volume ratio
//! `λ` of a representation, and the Milnor–Wood classification.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary::{eval_map, BoundaryMap};
use crate::error::{Error, Result};
use crate::hypcore::random::random_ideal_point;
use crate::lattice::{default_truncation, truncation_error_bound, HaarSampler, LatticePreset, BATCH_SIZE};
use crate::scalar::Real;
use crate::volcocycle::{v_n, volume, IdealSimplex, QuadConfig};

/// Monte-Carlo settings shared by every smearing estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct McConfig {
    pub samples: usize,
    pub seed: u64,
    /// Horoball height of the cusp truncation; `None` picks the height whose
    /// bias bound is 1e−3.
    pub truncation: Option<f64>,
    /// Cubature settings for `n ≥ 4` volumes.
    pub quad: QuadConfig,
}

impl Default for McConfig {
    fn default() -> Self {
        Self { samples: 100_000, seed: 0, truncation: None, quad: QuadConfig::default() }
    }
}

impl McConfig {
    pub fn truncation_for<T: Real>(&self, preset: &LatticePreset<T>) -> f64 {
        self.truncation.unwrap_or_else(|| default_truncation(preset))
    }
}

/// A Monte-Carlo estimate with its statistical and systematic error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    /// Sample standard deviation over `√n_samples`.
    pub std_error: f64,
    /// Worst-case bias from the cusp truncation.
    pub bias_bound: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl McEstimate {
    /// `3·std_error + bias_bound`.
    pub fn tolerance(&self) -> f64 {
        3.0 * self.std_error + self.bias_bound
    }

    fn scaled(&self, s: f64) -> Self {
        Self {
            value: self.value * s,
            std_error: self.std_error * s.abs(),
            bias_bound: self.bias_bound * s.abs(),
            ..self.clone()
        }
    }
}

/// Running count, mean and sum of squared deviations, merged with Chan's rule.
#[derive(Clone, Copy, Default)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, y: f64) {
        self.count += 1.0;
        let d = y - self.mean;
        self.mean += d / self.count;
        self.m2 += d * (y - self.mean);
    }

    fn merge(a: Self, b: Self) -> Self {
        if a.count == 0.0 {
            return b;
        }
        if b.count == 0.0 {
            return a;
        }
        let count = a.count + b.count;
        let d = b.mean - a.mean;
        Self {
            count,
            mean: a.mean + d * b.count / count,
            m2: a.m2 + b.m2 + d * d * a.count * b.count / count,
        }
    }

    /// Deterministic pairwise reduction in index order.
    fn reduce(parts: &[Self]) -> Self {
        match parts.len() {
            0 => Self::default(),
            1 => parts[0],
            k => Self::merge(Self::reduce(&parts[..k / 2]), Self::reduce(&parts[k / 2..])),
        }
    }

    fn std_error(&self) -> f64 {
        if self.count < 2.0 {
            return 0.0;
        }
        (self.m2 / (self.count - 1.0) / self.count).sqrt()
    }
}

/// `ε(g)·Vol_n(φ(gξ₀), …, φ(gξₙ))`.
fn integrand<T: Real>(
    phi: &BoundaryMap<T>,
    xi: &IdealSimplex<T>,
    g: &crate::hypcore::Isometry<T>,
    quad: &QuadConfig,
) -> Result<f64> {
    let mut images = Vec::with_capacity(xi.dim() + 1);
    for v in xi.vertices() {
        images.push(eval_map(phi, &g.act_ideal(v)?)?);
    }
    let vol = volume(&IdealSimplex::new(images)?, quad)?.value.as_f64();
    Ok(f64::from(g.sign()) * vol)
}

/// Estimates `∫_{Γ\G} ε(ġ⁻¹) Vol_n(φ(ġξ₀), …, φ(ġξₙ)) dμ(ġ)` by weighted
/// Haar sampling of a fundamental domain truncated at the cusp height.
pub fn smear_integral<T: Real>(
    preset: &LatticePreset<T>,
    phi: &BoundaryMap<T>,
    xi: &IdealSimplex<T>,
    cfg: &McConfig,
) -> Result<McEstimate> {
    if xi.dim() != preset.n {
        return Err(Error::DimensionMismatch { expected: preset.n, got: xi.dim() });
    }
    if cfg.samples == 0 {
        return Err(Error::InvalidInput("need at least one sample".into()));
    }
    let truncation = cfg.truncation_for(preset);
    let sampler = HaarSampler::new(preset, truncation)?;
    let batches = cfg.samples.div_ceil(BATCH_SIZE);
    let parts: Vec<Moments> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let len = BATCH_SIZE.min(cfg.samples - b * BATCH_SIZE);
            let mut m = Moments::default();
            for s in sampler.batch(cfg.seed, b as u64, len) {
                let w = s.weight.as_f64();
                let y = if w == 0.0 { 0.0 } else { w * integrand(phi, xi, &s.g, &cfg.quad)? };
                m.push(y);
            }
            Ok(m)
        })
        .collect::<Result<_>>()?;
    let total = Moments::reduce(&parts);
    Ok(McEstimate {
        value: total.mean,
        std_error: total.std_error(),
        bias_bound: truncation_error_bound(preset, truncation),
        n_samples: cfg.samples,
        seed: cfg.seed,
    })
}

/// Test simplices must satisfy `|Vol_n| ≥ VOLUME_FLOOR · v_n`.
pub const VOLUME_FLOOR: f64 = 0.1;
/// Smallest chord between two vertices of a test simplex.
pub const MIN_SEPARATION: f64 = 0.25;
const ATTEMPTS_PER_SIMPLEX: usize = 1000;

/// `λ̂` together with the per-simplex ratios it was combined from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioEstimate {
    pub lambda: McEstimate,
    pub per_simplex: Vec<McEstimate>,
    /// Every per-simplex ratio lies within 3σ (plus bias) of `λ̂`.
    pub consistent: bool,
    pub test_simplices: Vec<IdealSimplex<f64>>,
}

/// Distinct, reproducible seed for the `k`-th sub-estimate.
fn sub_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_add((k as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Up to `m` random well-separated boundary tuples with `|Vol_n| ≥ 0.1·v_n`.
pub fn test_simplices<T: Real>(
    n: usize,
    m: usize,
    seed: u64,
    quad: &QuadConfig,
) -> Result<Vec<IdealSimplex<T>>> {
    let vn = v_n(n)?.value;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    let attempts = ATTEMPTS_PER_SIMPLEX * m.max(1);
    let mut out = Vec::with_capacity(m);
    for _ in 0..attempts {
        if out.len() == m {
            break;
        }
        let verts: Vec<_> = (0..=n).map(|_| random_ideal_point::<T, _>(n, &mut rng)).collect();
        let separated = verts
            .iter()
            .enumerate()
            .all(|(i, a)| verts[i + 1..].iter().all(|b| a.chord(b).as_f64() >= MIN_SEPARATION));
        if !separated {
            continue;
        }
        let s = IdealSimplex::new(verts)?;
        if volume(&s, quad)?.value.as_f64().abs() >= VOLUME_FLOOR * vn {
            out.push(s);
        }
    }
    if out.is_empty() {
        return Err(Error::IllConditioned { attempts });
    }
    Ok(out)
}

/// Combines `smear_integral(ξ)/Vol_n(ξ)` over `m` test simplices by inverse
/// variance, each with its own sample stream.
pub fn volume_ratio<T: Real>(
    preset: &LatticePreset<T>,
    phi: &BoundaryMap<T>,
    cfg: &McConfig,
    m: usize,
) -> Result<RatioEstimate> {
    if m == 0 {
        return Err(Error::InvalidInput("need at least one test simplex".into()));
    }
    let simplices = test_simplices::<T>(preset.n, m, cfg.seed, &cfg.quad)?;
    let mut per_simplex = Vec::with_capacity(simplices.len());
    for (k, xi) in simplices.iter().enumerate() {
        let vol = volume(xi, &cfg.quad)?.value.as_f64();
        let sub = McConfig { seed: sub_seed(cfg.seed, k), ..cfg.clone() };
        per_simplex.push(smear_integral(preset, phi, xi, &sub)?.scaled(1.0 / vol));
    }
    let lambda = combine(&per_simplex, cfg);
    let consistent = per_simplex.iter().all(|r| {
        let spread = 3.0 * (r.std_error.powi(2) + lambda.std_error.powi(2)).sqrt() + r.bias_bound;
        (r.value - lambda.value).abs() <= spread + 1e-12
    });
    let test_simplices = simplices
        .iter()
        .map(|s| {
            IdealSimplex::from_coords(
                s.vertices().iter().map(|v| v.coords().iter().map(|x| x.as_f64()).collect()).collect(),
            )
        })
        .collect::<Result<_>>()?;
    Ok(RatioEstimate { lambda, per_simplex, consistent, test_simplices })
}

/// Inverse-variance mean; estimates with zero variance, if any, are averaged
/// on their own.
fn combine(parts: &[McEstimate], cfg: &McConfig) -> McEstimate {
    let exact: Vec<&McEstimate> = parts.iter().filter(|p| p.std_error == 0.0).collect();
    let (value, std_error) = if !exact.is_empty() {
        (exact.iter().map(|p| p.value).sum::<f64>() / exact.len() as f64, 0.0)
    } else {
        let wsum: f64 = parts.iter().map(|p| p.std_error.powi(-2)).sum();
        (parts.iter().map(|p| p.value * p.std_error.powi(-2)).sum::<f64>() / wsum, wsum.powf(-0.5))
    };
    McEstimate {
        value,
        std_error,
        bias_bound: parts.iter().map(|p| p.bias_bound).fold(0.0, f64::max),
        n_samples: parts.iter().map(|p| p.n_samples).sum(),
        seed: cfg.seed,
    }
}

/// Outcome of comparing `λ̂` with the Milnor–Wood bound `|λ| ≤ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MilnorWoodReport {
    /// `|λ̂| ≤ 1 + 3σ + bias`.
    pub passes: bool,
    /// `|λ̂| ≥ 1 − 3σ − bias`.
    pub maximal: bool,
    pub value: f64,
    pub tolerance: f64,
}

pub fn milnor_wood_check(lambda: &McEstimate) -> MilnorWoodReport {
    let tol = lambda.tolerance();
    let a = lambda.value.abs();
    MilnorWoodReport { passes: a <= 1.0 + tol, maximal: a >= 1.0 - tol, value: lambda.value, tolerance: tol }
}

/// `Vol(ρ) = λ̂ · covolume`, with errors scaled alike.
pub fn vol_of_rep<T: Real>(
    preset: &LatticePreset<T>,
    phi: &BoundaryMap<T>,
    cfg: &McConfig,
    m: usize,
) -> Result<McEstimate> {
    Ok(volume_ratio(preset, phi, cfg, m)?.lambda.scaled(preset.covolume()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypcore::{IdealPoint, Isometry};
    use crate::lattice::load_preset;
    use crate::linalg::Matrix;

    fn est(value: f64, std_error: f64) -> McEstimate {
        McEstimate { value, std_error, bias_bound: 0.0, n_samples: 1, seed: 0 }
    }

    #[test]
    fn milnor_wood_thresholds() {
        let r = milnor_wood_check(&est(1.0, 0.01));
        assert!(r.passes && r.maximal);
        let r = milnor_wood_check(&est(0.4, 0.01));
        assert!(r.passes && !r.maximal);
        assert!(!milnor_wood_check(&est(1.2, 0.01)).passes);
        assert!(milnor_wood_check(&est(-0.99, 0.01)).maximal);
    }

    #[test]
    fn moments_match_the_two_pass_formula() {
        let ys: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1 - 3.0).collect();
        let parts: Vec<Moments> = ys
            .chunks(77)
            .map(|c| {
                let mut m = Moments::default();
                c.iter().for_each(|&y| m.push(y));
                m
            })
            .collect();
        let m = Moments::reduce(&parts);
        let mean = ys.iter().sum::<f64>() / 1000.0;
        let var = ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / 999.0;
        assert!((m.mean - mean).abs() < 1e-12);
        assert!((m.std_error() - (var / 1000.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn repeated_vertex_smears_to_exactly_zero() {
        let p = load_preset::<f64>("test_reflection_2d").unwrap();
        let a = IdealPoint::axis(2, 0);
        let xi = IdealSimplex::new(vec![a.clone(), a, IdealPoint::axis(2, 1)]).unwrap();
        let phi = BoundaryMap::planted(Isometry::identity(2));
        let cfg = McConfig { samples: 2000, seed: 4, ..Default::default() };
        let e = smear_integral(&p, &phi, &xi, &cfg).unwrap();
        assert_eq!((e.value, e.std_error), (0.0, 0.0));
    }

    #[test]
    fn planted_identity_in_two_dimensions() {
        let p = load_preset::<f64>("test_reflection_2d").unwrap();
        let phi = BoundaryMap::planted(Isometry::identity(2));
        let cfg = McConfig { samples: 40_000, seed: 1, ..Default::default() };
        let r = volume_ratio(&p, &phi, &cfg, 4).unwrap();
        assert!((r.lambda.value - 1.0).abs() <= r.lambda.tolerance(), "{:?}", r.lambda);
        assert!(r.consistent);
        let flip = Matrix::from_fn(3, 3, |i, j| {
            if i != j {
                0.0
            } else if i == 0 {
                -1.0
            } else {
                1.0
            }
        });
        let mirrored = BoundaryMap::planted(Isometry::new(flip).unwrap());
        let r = volume_ratio(&p, &mirrored, &cfg, 4).unwrap();
        assert!((r.lambda.value + 1.0).abs() <= r.lambda.tolerance(), "{:?}", r.lambda);
    }

    #[test]
    fn constant_map_has_ratio_zero() {
        let p = load_preset::<f64>("test_reflection_2d").unwrap();
        let phi = BoundaryMap::Constant(IdealPoint::axis(2, 1));
        let cfg = McConfig { samples: 1000, seed: 2, ..Default::default() };
        let v = vol_of_rep(&p, &phi, &cfg, 2).unwrap();
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn wrong_dimension_is_rejected() {
        let p = load_preset::<f64>("test_reflection_2d").unwrap();
        let xi = crate::regref::reference_regular::<f64>(3, 1).into_simplex();
        let phi = BoundaryMap::planted(Isometry::identity(2));
        assert!(matches!(
            smear_integral(&p, &phi, &xi, &McConfig::default()),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
