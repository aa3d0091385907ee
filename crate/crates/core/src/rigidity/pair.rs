use crate::error::{Error, Result};
#[cfg(test)]
use crate::hypcore::IdealPoint;
use crate::hypcore::{minkowski_dot, Isometry};
use crate::linalg::Matrix;
use crate::regref::RegularSimplex;
use crate::scalar::Real;
use crate::volcocycle::IdealSimplex;

/// Residual above which two simplices are declared non-congruent.
pub const CONGRUENCE_TOL: f64 = 1e-7;

/// Best isometry taking the vertices of `source` towards those of `target`
/// in order, with the largest chord by which it misses a target vertex.
///
/// With null lifts `ŝᵢ`, `ĥᵢ` the map must send `ŝᵢ ↦ λᵢ ĥᵢ`, and preserving the
/// form forces `λᵢ λⱼ ⟨ĥᵢ, ĥⱼ⟩ = ⟨ŝᵢ, ŝⱼ⟩`. The scales come from a least-squares
/// fit of `log λᵢ + log λⱼ`; the matrix `H Λ S⁻¹` is then projected onto the
/// Lorentz group.
pub fn fit_isometry<T: Real>(
    source: &IdealSimplex<T>,
    target: &IdealSimplex<T>,
) -> Result<(Isometry<T>, f64)> {
    let n = source.dim();
    if target.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: target.dim() });
    }
    let s: Vec<Vec<T>> = source.vertices().iter().map(|v| v.null_lift()).collect();
    let h: Vec<Vec<T>> = target.vertices().iter().map(|v| v.null_lift()).collect();
    let m = n + 1;
    // Normal equations of Σ_{i<j} (lᵢ + lⱼ − rᵢⱼ)².
    let mut ata = Matrix::<T>::zeros(m, m);
    let mut atb = vec![T::zero(); m];
    for i in 0..m {
        for j in i + 1..m {
            let num = minkowski_dot(&s[i], &s[j]);
            let den = minkowski_dot(&h[i], &h[j]);
            if !(num < T::zero()) || !(den < T::zero()) {
                return Err(Error::DegenerateSimplex(i, j));
            }
            let r = (num / den).ln();
            for &(a, b) in &[(i, i), (j, j), (i, j), (j, i)] {
                ata[(a, b)] = ata[(a, b)] + T::one();
            }
            atb[i] = atb[i] + r;
            atb[j] = atb[j] + r;
        }
    }
    let logs = ata.solve(&atb).ok_or(Error::DegenerateConfiguration)?;
    let scaled_h: Vec<Vec<T>> =
        h.iter().zip(&logs).map(|(v, &l)| v.iter().map(|&x| x * l.exp()).collect()).collect();
    let sinv = Matrix::from_columns(&s).inverse().ok_or(Error::DegenerateConfiguration)?;
    let g = Isometry::nearest(Matrix::from_columns(&scaled_h).mul(&sinv))?;
    let mut residual = 0.0_f64;
    for (v, w) in source.vertices().iter().zip(target.vertices()) {
        residual = residual.max(g.act_ideal(v)?.chord(w).as_f64());
    }
    Ok((g, residual))
}

/// The isometry taking the vertices of `source` to those of `target` in
/// order. Fails with [`Error::NoExactSolve`] when the best fit misses a target
/// vertex by more than [`CONGRUENCE_TOL`].
pub fn isometry_between<T: Real>(source: &IdealSimplex<T>, target: &IdealSimplex<T>) -> Result<Isometry<T>> {
    let (g, residual) = fit_isometry(source, target)?;
    if !(residual <= CONGRUENCE_TOL) {
        return Err(Error::NoExactSolve { residual });
    }
    Ok(g)
}

/// The unique isometry carrying one regular simplex onto another, vertex by
/// vertex; orientation-preserving iff the orientations agree.
pub fn isometry_from_simplex_pair<T: Real>(
    source: &RegularSimplex<T>,
    target: &RegularSimplex<T>,
) -> Result<Isometry<T>> {
    isometry_between(source.simplex(), target.simplex())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypcore::random::{random_isometry, OrientationChoice};
    use crate::regref::reference_regular;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_and_planted_targets() {
        let s = reference_regular::<f64>(3, 1);
        let id = isometry_from_simplex_pair(&s, &s).unwrap();
        assert!(id.distance(&Isometry::identity(3)) < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [2, 3, 4] {
            let s = reference_regular::<f64>(n, 1);
            let g = random_isometry::<f64, _>(n, 1.5, OrientationChoice::Any, &mut rng);
            let h = isometry_from_simplex_pair(&s, &s.transformed(&g).unwrap()).unwrap();
            assert!(h.distance(&g) < 1e-9, "n = {n}: {}", h.distance(&g));
            assert_eq!(h.sign(), g.sign());
        }
    }

    #[test]
    fn swapping_two_vertices_needs_a_reflection() {
        let s = reference_regular::<f64>(3, 1);
        let t = RegularSimplex::new(s.simplex().swapped(0, 1), 1e-9).unwrap();
        let h = isometry_from_simplex_pair(&s, &t).unwrap();
        assert_eq!(h.sign(), -1);
        assert_eq!(t.orientation(), -s.orientation());
    }

    #[test]
    fn unique_under_relabelling() {
        // Solving with the vertices listed in another order must give the
        // same map.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = reference_regular::<f64>(4, 1);
        let g = random_isometry::<f64, _>(4, 1.0, OrientationChoice::Preserving, &mut rng);
        let t = s.transformed(&g).unwrap();
        let h = isometry_between(s.simplex(), t.simplex()).unwrap();
        for (i, j) in [(0, 4), (1, 3), (2, 0)] {
            let h2 = isometry_between(&s.simplex().swapped(i, j), &t.simplex().swapped(i, j)).unwrap();
            assert!(h2.distance(&h) < 1e-9);
        }
    }

    #[test]
    fn non_congruent_targets_are_rejected() {
        let s = reference_regular::<f64>(3, 1);
        let bent = IdealSimplex::new(vec![
            s.vertices()[0].clone(),
            s.vertices()[1].clone(),
            s.vertices()[2].clone(),
            IdealPoint::from_direction(vec![0.1, -0.2, -1.0]).unwrap(),
        ])
        .unwrap();
        assert!(matches!(isometry_between(s.simplex(), &bent), Err(Error::NoExactSolve { .. })));
        let (_, residual) = fit_isometry(s.simplex(), &bent).unwrap();
        assert!(residual > 1e-3);
    }
}
