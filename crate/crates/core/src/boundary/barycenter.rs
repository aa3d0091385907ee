use super::BoundaryMeasure;
use crate::error::{Error, Result};
use crate::hypcore::{ball_to_hyperboloid, IdealPoint, Isometry, SpacePoint};
use crate::linalg::{axpy, norm, scaled, Matrix};
use crate::scalar::Real;

/// `V(0) = Σ wᵢ ξᵢ` for the measure carried by `points`.
fn field_at_origin<T: Real>(points: &[IdealPoint<T>], weights: &[T]) -> Vec<T> {
    let mut v = vec![T::zero(); points[0].dim()];
    for (p, &w) in points.iter().zip(weights) {
        axpy(&mut v, w, p.coords());
    }
    v
}

/// The conformal (Douady–Earle) barycenter: the unique point `b` where
/// `V(b) = Σ wᵢ γ_b(ξᵢ)` vanishes, `γ_b` being the transvection moving `b` to
/// the origin.
///
/// Each iteration recentres the measure at the current estimate, so the
/// field and its derivative are always evaluated at the origin, where the
/// Jacobian is `−2(I − Σ wᵢ ξᵢ ξᵢᵀ)`. Steps are halved until `‖V‖` decreases.
/// The initial guess is half the Euclidean mean of the atoms.
pub fn conformal_barycenter<T: Real>(
    mu: &BoundaryMeasure<T>,
    tol: T,
    max_iter: usize,
) -> Result<SpacePoint<T>> {
    if let Some(a) = mu.atoms().iter().find(|a| a.weight >= T::lit(0.5)) {
        return Err(Error::DominantAtom { mass: a.weight.as_f64() });
    }
    let n = mu.dim();
    let weights: Vec<T> = mu.atoms().iter().map(|a| a.weight).collect();
    let original: Vec<IdealPoint<T>> = mu.atoms().iter().map(|a| a.point.clone()).collect();
    // `g` moves the current estimate to the origin.
    let start = scaled(&field_at_origin(&original, &weights), T::lit(0.5));
    let mut g = Isometry::translation_to(&ball_to_hyperboloid(&start)?).inverse();
    let mut points = push(&g, &original)?;
    let mut v = field_at_origin(&points, &weights);
    let mut residual = norm(&v);
    for _ in 0..max_iter {
        if residual <= tol {
            return g.inverse().act_point(&SpacePoint::basepoint(n));
        }
        let mut jac = Matrix::identity(n);
        for (p, &w) in points.iter().zip(&weights) {
            let c = p.coords();
            for i in 0..n {
                for j in 0..n {
                    jac[(i, j)] = jac[(i, j)] - w * c[i] * c[j];
                }
            }
        }
        let step = jac.solve(&v).unwrap_or_else(|| v.clone());
        let mut t = T::lit(0.5);
        let mut accepted = false;
        for _ in 0..60 {
            let b = scaled(&step, t);
            if norm(&b) < T::lit(0.99) {
                let h = Isometry::translation_to(&ball_to_hyperboloid(&b)?).inverse();
                let trial = push(&h, &points)?;
                let tv = field_at_origin(&trial, &weights);
                let tr = norm(&tv);
                if tr < residual {
                    g = h.compose(&g).repaired();
                    points = trial;
                    v = tv;
                    residual = tr;
                    accepted = true;
                    break;
                }
            }
            t = t / T::lit(2.0);
        }
        if !accepted {
            break;
        }
    }
    if residual <= tol {
        return g.inverse().act_point(&SpacePoint::basepoint(n));
    }
    Err(Error::NoConvergence { iterations: max_iter, residual: residual.as_f64() })
}

fn push<T: Real>(g: &Isometry<T>, points: &[IdealPoint<T>]) -> Result<Vec<IdealPoint<T>>> {
    points.iter().map(|p| g.act_ideal(p)).collect()
}
