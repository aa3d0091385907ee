//! Boundary measures, the conformal barycenter and evaluatable boundary maps.

mod barycenter;
mod map;
mod measure;

pub use barycenter::conformal_barycenter;
pub use map::{eval_map, make_boundary_map, BoundaryMap, MapSpec, Mode, TableRow};
pub use measure::{dominant_atom, Atom, BoundaryMeasure};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypcore::random::{random_ideal_point, random_isometry, OrientationChoice};
    use crate::hypcore::{IdealPoint, Isometry, SpacePoint};
    use crate::regref::reference_regular;
    use crate::volcocycle::{is_regular, orientation_sign, IdealSimplex};
    use crate::Error;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn atoms(points: &[IdealPoint<f64>], weights: &[f64]) -> BoundaryMeasure<f64> {
        BoundaryMeasure::new(
            points.iter().zip(weights).map(|(p, &w)| Atom { point: p.clone(), weight: w }).collect(),
        )
        .unwrap()
    }

    #[test]
    fn dominant_atom_cases() {
        let a = IdealPoint::axis(3, 0);
        let b = IdealPoint::axis(3, 1);
        let c = IdealPoint::axis(3, 2);
        assert_eq!(dominant_atom(&atoms(std::slice::from_ref(&a), &[1.0])), Some(a.clone()));
        assert_eq!(dominant_atom(&atoms(&[a.clone(), b.clone()], &[0.5, 0.5])), None);
        let third = 1.0 / 3.0;
        assert_eq!(dominant_atom(&atoms(&[a.clone(), b.clone(), c], &[third; 3])), None);
        assert_eq!(dominant_atom(&atoms(&[b, a.clone()], &[0.4, 0.6])), Some(a));
    }

    #[test]
    fn measure_validation() {
        let a = IdealPoint::<f64>::axis(2, 0);
        assert!(matches!(
            BoundaryMeasure::new(vec![Atom { point: a.clone(), weight: 0.7 }]),
            Err(Error::InvalidMeasure(_))
        ));
        let twice = vec![Atom { point: a.clone(), weight: 0.5 }, Atom { point: a, weight: 0.5 }];
        assert!(matches!(BoundaryMeasure::new(twice), Err(Error::InvalidMeasure(_))));
    }

    #[test]
    fn barycenter_of_regular_vertices_is_the_origin() {
        for n in 2..=4 {
            let s = reference_regular::<f64>(n, 1);
            let mu = BoundaryMeasure::uniform(s.vertices().to_vec()).unwrap();
            let b = conformal_barycenter(&mu, 1e-13, 100).unwrap();
            assert!(b.distance(&SpacePoint::basepoint(n)) < 1e-12);
        }
    }

    #[test]
    fn barycenter_is_equivariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let k = rng.random_range(3..7);
            let pts: Vec<IdealPoint<f64>> = (0..k).map(|_| random_ideal_point(3, &mut rng)).collect();
            let mut w: Vec<f64> = (0..k).map(|_| 0.2 + rng.random::<f64>()).collect();
            let total: f64 = w.iter().sum();
            w.iter_mut().for_each(|x| *x /= total);
            if w.iter().any(|&x| x >= 0.5) {
                continue;
            }
            let mu = atoms(&pts, &w);
            let g = random_isometry::<f64, _>(3, 2.0, OrientationChoice::Any, &mut rng);
            let lhs = conformal_barycenter(&mu.pushforward(&g).unwrap(), 1e-13, 200).unwrap();
            let rhs = g.act_point(&conformal_barycenter(&mu, 1e-13, 200).unwrap()).unwrap();
            assert!(lhs.distance(&rhs) < 1e-8);
        }
    }

    #[test]
    fn barycenter_rejects_half_mass_atoms() {
        let mu = atoms(&[IdealPoint::axis(3, 0), IdealPoint::axis(3, 1)], &[0.5, 0.5]);
        assert!(matches!(conformal_barycenter(&mu, 1e-12, 50), Err(Error::DominantAtom { .. })));
    }

    #[test]
    fn planted_and_zero_perturbation_agree_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_isometry::<f64, _>(3, 1.5, OrientationChoice::Any, &mut rng);
        let planted = BoundaryMap::planted(g.clone());
        let still = BoundaryMap::perturbed(g.clone(), 0.0, 9).unwrap();
        for _ in 0..20 {
            let xi = random_ideal_point(3, &mut rng);
            let a = eval_map(&planted, &xi).unwrap();
            assert_eq!(a, g.act_ideal(&xi).unwrap());
            assert_eq!(eval_map(&still, &xi).unwrap(), a);
        }
        let id = BoundaryMap::planted(Isometry::<f64>::identity(3));
        let xi = random_ideal_point(3, &mut rng);
        assert!(eval_map(&id, &xi).unwrap().chord(&xi) < 1e-15);
    }

    #[test]
    fn perturbation_respects_its_amplitude() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = random_isometry::<f64, _>(4, 1.0, OrientationChoice::Preserving, &mut rng);
        let amp = 1e-3;
        let phi = BoundaryMap::perturbed(g.clone(), amp, 1).unwrap();
        let mut largest: f64 = 0.0;
        for _ in 0..200 {
            let xi = random_ideal_point(4, &mut rng);
            let d = eval_map(&phi, &xi).unwrap().chord(&g.act_ideal(&xi).unwrap());
            assert!(d <= amp * (1.0 + 1e-9));
            largest = largest.max(d);
        }
        assert!(largest > 0.05 * amp);
    }

    #[test]
    fn planted_maps_carry_regular_simplices_to_regular_ones() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = reference_regular::<f64>(3, 1);
        for choice in [OrientationChoice::Preserving, OrientationChoice::Reversing] {
            let g = random_isometry::<f64, _>(3, 2.0, choice, &mut rng);
            let phi = BoundaryMap::planted(g.clone());
            let image =
                IdealSimplex::new(s.vertices().iter().map(|v| eval_map(&phi, v).unwrap()).collect()).unwrap();
            assert!(is_regular(&image, 1e-9).unwrap());
            assert_eq!(orientation_sign(&image), g.sign());
        }
    }

    #[test]
    fn tabulated_lookup() {
        let a = IdealPoint::<f64>::axis(3, 0);
        let b = IdealPoint::<f64>::axis(3, 1);
        let spec = MapSpec::Tabulated {
            samples: vec![TableRow { from: a.coords().to_vec(), to: b.coords().to_vec() }],
            radius: 0.1,
        };
        let phi = make_boundary_map::<f64>(&spec).unwrap();
        let near = IdealPoint::from_direction(vec![1.0, 0.01, 0.0]).unwrap();
        assert_eq!(eval_map(&phi, &near).unwrap(), b);
        assert!(matches!(eval_map(&phi, &b), Err(Error::OutOfTable { .. })));
        assert_eq!(phi.spec(), spec);
    }

    #[test]
    fn spec_round_trips_through_json() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let g = random_isometry::<f64, _>(3, 1.0, OrientationChoice::Any, &mut rng);
        let phi = BoundaryMap::perturbed(g, 1e-3, 17).unwrap().post_composed(Isometry::identity(3));
        let json = serde_json::to_string(&phi.spec()).unwrap();
        let back: MapSpec = serde_json::from_str(&json).unwrap();
        let again = make_boundary_map::<f64>(&back).unwrap();
        let xi = random_ideal_point(3, &mut rng);
        assert!(eval_map(&phi, &xi).unwrap().chord(&eval_map(&again, &xi).unwrap()) < 1e-12);
    }
}
