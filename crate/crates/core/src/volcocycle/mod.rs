//! The signed volume cocycle `Vol_n` on ideal simplices, the constants `v_n`
//! and the cocycle/regularity checks built on them.
//!
//! Sign convention: `Vol_n` is positive on simplices whose null lifts
//! `(ξᵢ, 1)` have positive determinant, which includes the reference regular
//! simplex of orientation `+1`.

mod ascent;
mod exact;
mod lobachevsky;
mod quadrature;
mod simplex;

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

pub use ascent::{ascend_volume, AscentResult};
pub use exact::{shape_parameter, vol2, vol3};
pub use lobachevsky::lobachevsky;
pub use quadrature::{voln, QuadConfig, MAX_QUADRATURE_DIM};
pub use simplex::{is_regular, orientation_sign, regularity_deviation, IdealSimplex};

use crate::error::{Error, Result};
use crate::hypcore::IdealPoint;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VolumeMethod {
    Exact2,
    Lobachevsky3,
    Quadrature,
}

/// A signed volume together with an error bound and the method behind it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeResult<T> {
    pub value: T,
    pub abs_error: T,
    pub method: VolumeMethod,
}

/// `Vol_n` with the best available method: exact for `n = 2, 3`, cubature
/// with `quad` above.
pub fn volume<T: Real>(s: &IdealSimplex<T>, quad: &QuadConfig) -> Result<VolumeResult<T>> {
    match s.dim() {
        2 => vol2(s),
        3 => vol3(s),
        _ => voln(s, quad),
    }
}

/// `Σ_j (−1)^j Vol_n(ξ_0, …, ξ̂_j, …, ξ_{n+1})`; the reported error is the sum of
/// the face errors. Vanishes for a cocycle.
pub fn vol_defect<T: Real>(points: &[IdealPoint<T>], quad: &QuadConfig) -> Result<VolumeResult<T>> {
    let Some(first) = points.first() else {
        return Err(Error::InvalidInput("no points".into()));
    };
    let n = first.dim();
    if points.len() != n + 2 {
        return Err(Error::DimensionMismatch { expected: n + 2, got: points.len() });
    }
    let mut value = T::zero();
    let mut abs_error = T::zero();
    let mut method = VolumeMethod::Exact2;
    for j in 0..points.len() {
        let face: Vec<IdealPoint<T>> =
            points.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, p)| p.clone()).collect();
        let r = volume(&IdealSimplex::new(face)?, quad)?;
        value = if j % 2 == 0 { value + r.value } else { value - r.value };
        abs_error = abs_error + r.abs_error;
        method = r.method;
    }
    Ok(VolumeResult { value, abs_error, method })
}

/// Cubature settings used for the cached constants `v_n`, `n ≥ 4`.
pub fn reference_quad() -> QuadConfig {
    QuadConfig { order: 10, rel_tol: 1e-12, abs_tol: 1e-14, ..QuadConfig::default() }
}

/// Volume of the regular ideal `n`-simplex, the maximum of `|Vol_n|`. Cached.
pub fn v_n(n: usize) -> Result<VolumeResult<f64>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, VolumeResult<f64>>>> = OnceLock::new();
    if n < 2 {
        return Err(Error::InvalidInput(format!("v_n needs n ≥ 2, got {n}")));
    }
    let cache = CACHE.get_or_init(Default::default);
    if let Some(r) = cache.lock().expect("cache poisoned").get(&n) {
        return Ok(*r);
    }
    let s = crate::regref::reference_regular::<f64>(n, 1).into_simplex();
    let mut r = volume(&s, &reference_quad())?;
    r.value = r.value.abs();
    cache.lock().expect("cache poisoned").insert(n, r);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypcore::random::{random_ideal_point, random_isometry, OrientationChoice};
    use crate::regref::reference_regular;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    /// Independent high-accuracy value of `v_4` from a separate Duffy/Gauss–Legendre
    /// computation.
    const V4: f64 = 0.268_895_660_169_312_27;

    fn random_simplex(n: usize, rng: &mut ChaCha8Rng) -> IdealSimplex<f64> {
        IdealSimplex::new((0..=n).map(|_| random_ideal_point(n, rng)).collect()).unwrap()
    }

    #[test]
    fn constants_in_low_dimension() {
        assert_eq!(v_n(2).unwrap().value, PI);
        assert!((v_n(3).unwrap().value - 1.014_941_606_409_653_6).abs() < 1e-14);
    }

    #[test]
    fn v4_matches_the_independent_value() {
        let r = v_n(4).unwrap();
        assert!((r.value - V4).abs() < 1e-10, "{r:?}");
        assert!(r.abs_error < 1e-10);
    }

    #[test]
    fn v4_is_stable_under_refinement() {
        let s = reference_regular::<f64>(4, 1).into_simplex();
        let a = voln(&s, &QuadConfig::default()).unwrap();
        let b = voln(&s, &QuadConfig { initial_splits: 2, ..QuadConfig::default() }).unwrap();
        assert!((a.value - b.value).abs() <= a.abs_error + b.abs_error + 1e-14);
        assert!(a.value > 0.0);
    }

    #[test]
    fn quadrature_matches_exact_paths() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let s3 = random_simplex(3, &mut rng);
            let (a, b) = (vol3(&s3).unwrap(), voln(&s3, &QuadConfig::default()).unwrap());
            assert!((a.value - b.value).abs() < 1e-6, "{a:?} vs {b:?}");
            let s2 = random_simplex(2, &mut rng);
            let (a, b) = (vol2(&s2).unwrap(), voln(&s2, &QuadConfig::default()).unwrap());
            assert!((a.value - b.value).abs() < 1e-6, "{a:?} vs {b:?}");
        }
        let r = reference_regular::<f64>(3, 1).into_simplex();
        let q = voln(&r, &QuadConfig::default()).unwrap();
        assert!((q.value - v_n(3).unwrap().value).abs() < 1e-6);
    }

    #[test]
    fn defect_vanishes_in_dimension_two_and_three() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let quad = QuadConfig::default();
        for _ in 0..50 {
            let p2: Vec<_> = (0..4).map(|_| random_ideal_point::<f64, _>(2, &mut rng)).collect();
            assert!(vol_defect(&p2, &quad).unwrap().value.abs() < 1e-12);
            let p3: Vec<_> = (0..5).map(|_| random_ideal_point::<f64, _>(3, &mut rng)).collect();
            assert!(vol_defect(&p3, &quad).unwrap().value.abs() < 1e-9);
        }
        let same = vec![IdealPoint::<f64>::axis(3, 0); 5];
        assert_eq!(vol_defect(&same, &quad).unwrap().value, 0.0);
    }

    #[test]
    fn equivariance_and_alternation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let s = random_simplex(3, &mut rng);
            let g = random_isometry::<f64, _>(3, 2.0, OrientationChoice::Any, &mut rng);
            let lhs = vol3(&s.transformed(&g).unwrap()).unwrap().value;
            let rhs = g.sign() as f64 * vol3(&s).unwrap().value;
            assert!((lhs - rhs).abs() < 1e-9);
            let swapped = vol3(&s.swapped(1, 3)).unwrap().value;
            assert!((swapped + vol3(&s).unwrap().value).abs() < 1e-12);
        }
    }

    #[test]
    fn orientation_of_the_reference_simplex() {
        for n in 2..=5 {
            let s = reference_regular::<f64>(n, 1).into_simplex();
            assert_eq!(orientation_sign(&s), 1);
            assert_eq!(orientation_sign(&s.swapped(0, 1)), -1);
        }
    }

    #[test]
    fn concyclic_points_are_degenerate() {
        let s = IdealSimplex::from_coords(
            (0..4)
                .map(|k| {
                    let a = 0.4 + 1.3 * k as f64;
                    vec![0.6 * a.cos(), 0.6 * a.sin(), 0.8]
                })
                .collect(),
        )
        .unwrap();
        assert_eq!(orientation_sign(&s), 0);
        assert_eq!(vol3(&s).unwrap().value, 0.0);
    }

    #[test]
    fn regularity_test() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = reference_regular::<f64>(3, 1).into_simplex();
        assert!(is_regular(&s, 1e-9).unwrap());
        for _ in 0..50 {
            let g = random_isometry::<f64, _>(3, 3.0, OrientationChoice::Any, &mut rng);
            assert!(is_regular(&s.transformed(&g).unwrap(), 1e-9).unwrap());
        }
        let mut coords: Vec<Vec<f64>> = s.vertices().iter().map(|v| v.coords().to_vec()).collect();
        coords[2][0] += 1e-2;
        let bent =
            IdealSimplex::new(coords.into_iter().map(|c| IdealPoint::from_direction(c).unwrap()).collect())
                .unwrap();
        assert!(!is_regular(&bent, 1e-6).unwrap());
        let dup = IdealSimplex::new(vec![s.vertex(0).clone(); 4]).unwrap();
        assert!(matches!(is_regular(&dup, 1e-6), Err(Error::DegenerateSimplex(0, 1))));
    }
}
