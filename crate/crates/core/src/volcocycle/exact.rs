use num_complex::Complex;

use super::{lobachevsky, orientation_sign, IdealSimplex, VolumeMethod, VolumeResult};
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::scalar::Real;

fn zero<T: Real>(method: VolumeMethod) -> VolumeResult<T> {
    VolumeResult { value: T::zero(), abs_error: T::zero(), method }
}

fn expect_dim<T: Real>(s: &IdealSimplex<T>, n: usize) -> Result<()> {
    if s.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: s.dim() });
    }
    Ok(())
}

/// Signed area of an ideal triangle: `±π`, or 0 for a repeated vertex.
pub fn vol2<T: Real>(s: &IdealSimplex<T>) -> Result<VolumeResult<T>> {
    expect_dim(s, 2)?;
    let sign = orientation_sign(s);
    Ok(VolumeResult {
        value: T::PI() * T::lit(sign as f64),
        abs_error: T::zero(),
        method: VolumeMethod::Exact2,
    })
}

/// Signed volume of an ideal tetrahedron from its shape parameter.
pub fn vol3<T: Real>(s: &IdealSimplex<T>) -> Result<VolumeResult<T>> {
    expect_dim(s, 3)?;
    let sign = orientation_sign(s);
    if sign == 0 {
        return Ok(zero(VolumeMethod::Lobachevsky3));
    }
    let z = shape_parameter(s);
    let one = Complex::new(T::one(), T::zero());
    let unsigned =
        lobachevsky(z.arg()) + lobachevsky((one / (one - z)).arg()) + lobachevsky(((z - one) / z).arg());
    Ok(VolumeResult {
        value: unsigned * T::lit(sign as f64),
        abs_error: T::lit(1e-12).max(T::epsilon() * T::lit(16.0)),
        method: VolumeMethod::Lobachevsky3,
    })
}

/// Cross-ratio of the four vertices in a stereographic chart of `S²`: the
/// Möbius map sending `ξ0, ξ2, ξ1` to `0, 1, ∞` takes `ξ3` to `z`. Returned
/// with `Im z ≥ 0`; the three dihedral angles are the arguments of
/// `z, 1/(1−z), (z−1)/z`.
pub fn shape_parameter<T: Real>(s: &IdealSimplex<T>) -> Complex<T> {
    let w = chart(s);
    let z = ((w[3] - w[0]) * (w[2] - w[1])) / ((w[3] - w[1]) * (w[2] - w[0]));
    if z.im < T::zero() {
        z.conj()
    } else {
        z
    }
}

/// Stereographic coordinates from whichever pole `±e_k` is farthest from
/// every vertex, so no vertex lands near ∞.
fn chart<T: Real>(s: &IdealSimplex<T>) -> Vec<Complex<T>> {
    let mut best = (T::neg_infinity(), 0usize, T::one());
    for k in 0..3 {
        for sgn in [T::one(), -T::one()] {
            let closest =
                s.vertices().iter().map(|v| T::one() - sgn * v.coords()[k]).fold(T::infinity(), T::min);
            if closest > best.0 {
                best = (closest, k, sgn);
            }
        }
    }
    let (_, k, sgn) = best;
    let (a, b) = ((k + 1) % 3, (k + 2) % 3);
    s.vertices()
        .iter()
        .map(|v| {
            let c = v.coords();
            let mut pole = [T::zero(); 3];
            pole[k] = sgn;
            let den = T::one() - dot(c, &pole);
            Complex::new(c[a] / den, c[b] / den)
        })
        .collect()
}
