use std::sync::OnceLock;

use crate::scalar::Real;

const TERMS: usize = 30;

/// `ζ(2k)/(k(2k+1))` for `k = 1..=TERMS`.
fn coefficients() -> &'static [f64; TERMS] {
    static TABLE: OnceLock<[f64; TERMS]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        let mut c = [0.0; TERMS];
        for (i, slot) in c.iter_mut().enumerate() {
            let k = i + 1;
            let s = 2 * k;
            let zeta = match k {
                1 => pi2 / 6.0,
                2 => pi2 * pi2 / 90.0,
                _ => {
                    // Direct sum with an integral tail; exact to rounding for s ≥ 6.
                    let m = 1000usize;
                    let mut acc = 0.0;
                    for j in (1..=m).rev() {
                        acc += (j as f64).powi(-(s as i32));
                    }
                    acc + (m as f64 + 0.5).powi(1 - s as i32) / (s as f64 - 1.0)
                }
            };
            *slot = zeta / (k as f64 * (2 * k + 1) as f64);
        }
        c
    })
}

/// The Lobachevsky function `Л(θ) = −∫₀^θ log|2 sin t| dt`.
///
/// Odd and π-periodic. After reduction to `(−π/2, π/2]` it is evaluated as
/// `θ − θ log|2θ| + θ Σ_k ζ(2k)/(k(2k+1)) (θ/π)^{2k}`, which converges at
/// least like `4^{−k}`.
pub fn lobachevsky<T: Real>(theta: T) -> T {
    let pi = T::PI();
    let r = theta - pi * (theta / pi).round();
    if r == T::zero() || !r.is_finite() {
        return T::zero();
    }
    let a = r.abs();
    let q = (a / pi) * (a / pi);
    let mut series = T::zero();
    let mut pw = q;
    for &c in coefficients().iter() {
        let term = T::lit(c) * pw;
        series = series + term;
        if term < T::epsilon() * series {
            break;
        }
        pw = pw * q;
    }
    let value = a - a * (T::lit(2.0) * a).ln() + a * series;
    if r < T::zero() {
        -value
    } else {
        value
    }
}
