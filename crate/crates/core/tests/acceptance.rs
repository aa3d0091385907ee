//! Acceptance run: prints one PASS/FAIL line per criterion and exits nonzero
//! if any criterion fails.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use hyprig::boundary::{conformal_barycenter, Atom, BoundaryMap, BoundaryMeasure};
use hyprig::hypcore::random::{random_ideal_point, random_isometry, random_point, OrientationChoice};
use hyprig::hypcore::{
    hyperplane_through, minkowski_dot, reflect_in, straighten, IdealPoint, Isometry, Vertex,
};
use hyprig::lattice::{load_preset, LatticePreset};
use hyprig::linalg::Matrix;
use hyprig::rigidity::{consensus, preserves_regular, verify_conjugacy, ConsensusConfig};
use hyprig::smear::{milnor_wood_check, volume_ratio, McConfig};
use hyprig::volcocycle::{ascend_volume, is_regular, v_n, vol_defect, volume, IdealSimplex, QuadConfig};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_simplex(n: usize, rng: &mut ChaCha8Rng) -> IdealSimplex<f64> {
    IdealSimplex::new((0..=n).map(|_| random_ideal_point(n, rng)).collect()).unwrap()
}

fn figure_eight() -> LatticePreset<f64> {
    load_preset("figure_eight_3d").expect("builtin preset loads")
}

fn reflection(n: usize) -> Isometry<f64> {
    let mut m = Matrix::identity(n + 1);
    m[(0, 0)] = -1.0;
    Isometry::new(m).unwrap()
}

fn cocycle() -> Outcome {
    let q = QuadConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let tuples3: Vec<Vec<IdealPoint<f64>>> =
        (0..1000).map(|_| (0..5).map(|_| random_ideal_point(3, &mut rng)).collect()).collect();
    let worst3 = tuples3.iter().map(|t| vol_defect(t, &q).unwrap().value.abs()).fold(0.0_f64, f64::max);

    let tuples4: Vec<Vec<IdealPoint<f64>>> =
        (0..200).map(|_| (0..6).map(|_| random_ideal_point(4, &mut rng)).collect()).collect();
    let defects4: Vec<_> = tuples4.par_iter().map(|t| vol_defect(t, &q).unwrap()).collect();
    let over4 = defects4.iter().filter(|d| d.value.abs() > d.abs_error).count();
    let worst4 = defects4.iter().map(|d| d.value.abs()).fold(0.0_f64, f64::max);
    ensure(
        worst3 <= 1e-9 && over4 == 0,
        format!(
            "n=3 max defect {worst3:.2e}; n=4 max defect {worst4:.2e}, {over4}/200 above their error bound"
        ),
    )
}

fn equivariance() -> Outcome {
    let q = QuadConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst = 0.0_f64;
    for k in 0..500 {
        let n = 2 + k % 2;
        let g = random_isometry::<f64, _>(n, 2.0, OrientationChoice::Any, &mut rng);
        let s = random_simplex(n, &mut rng);
        let lhs = volume(&s.transformed(&g).unwrap(), &q).unwrap().value;
        let rhs = f64::from(g.sign()) * volume(&s, &q).unwrap().value;
        worst = worst.max((lhs - rhs).abs());
    }
    ensure(worst <= 1e-9, format!("max |Vol(g·ξ) − ε(g)Vol(ξ)| = {worst:.2e} over 500 pairs"))
}

fn maximality() -> Outcome {
    let q = QuadConfig::default();
    let v3 = v_n(3).unwrap().value;
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let largest = (0..10_000)
        .map(|_| volume(&random_simplex(3, &mut rng), &q).unwrap().value.abs())
        .fold(0.0_f64, f64::max);
    let starts: Vec<_> = (0..20).map(|_| random_simplex(3, &mut rng)).collect();
    let runs: Vec<_> = starts
        .par_iter()
        .map(|s| {
            let r = ascend_volume(s, &q, 1e-9, 10_000).unwrap();
            ((r.volume - v3).abs(), is_regular(&r.simplex, 1e-4).unwrap())
        })
        .collect();
    let gap = runs.iter().map(|r| r.0).fold(0.0_f64, f64::max);
    let regular = runs.iter().filter(|r| r.1).count();
    ensure(
        largest <= v3 + 1e-9 && gap <= 1e-6 && regular == 20,
        format!("max random |Vol3| {largest:.6} vs v3 {v3:.10}; ascent gap {gap:.2e}, {regular}/20 regular"),
    )
}

fn proportionality() -> Outcome {
    let ratio = figure_eight().covolume() / v_n(3).unwrap().value;
    ensure((ratio - 2.0).abs() <= 1e-6, format!("covolume / v3 = {ratio:.12}"))
}

fn smear_run(phi: &BoundaryMap<f64>, target: f64, seed: u64) -> Outcome {
    let cfg = McConfig { samples: 200_000, seed, ..McConfig::default() };
    let r = volume_ratio(&figure_eight(), phi, &cfg, 8).map_err(|e| e.to_string())?;
    let tol = r.lambda.tolerance();
    let strays = r.per_simplex.iter().filter(|e| (e.value - target).abs() > e.tolerance()).count();
    ensure(
        strays == 0 && (r.lambda.value - target).abs() <= tol && tol <= 0.05,
        format!(
            "λ = {:.4} ± {:.4} (3σ + bias), {} of 8 simplices outside their tolerance",
            r.lambda.value, tol, strays
        ),
    )
}

fn milnor_wood() -> Outcome {
    let preset = figure_eight();
    let cfg = McConfig { samples: 20_000, seed: 17, ..McConfig::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut maps = vec![("identity".to_string(), BoundaryMap::planted(Isometry::identity(3)))];
    for k in 0..5 {
        let g = random_isometry::<f64, _>(3, 1.5, OrientationChoice::Any, &mut rng);
        maps.push((format!("conjugation {k}"), BoundaryMap::planted(g)));
    }
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, phi) in &maps {
        let r = volume_ratio(&preset, phi, &cfg, 4).map_err(|e| e.to_string())?;
        let report = milnor_wood_check(&r.lambda);
        ok &= report.passes;
        lines.push(format!("{name} {:.3}", report.value));
    }
    let constant = BoundaryMap::Constant(IdealPoint::axis(3, 0));
    let r = volume_ratio(&preset, &constant, &cfg, 4).map_err(|e| e.to_string())?;
    ok &= r.lambda.value.abs() <= 3.0 * r.lambda.std_error;
    lines.push(format!("constant {:.3}", r.lambda.value));
    ensure(ok, lines.join(", "))
}

fn end_to_end() -> Outcome {
    let preset = figure_eight();
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let gs: Vec<_> =
        (0..20).map(|_| random_isometry::<f64, _>(3, 1.5, OrientationChoice::Any, &mut rng)).collect();
    let results: Vec<Result<f64, String>> = gs
        .par_iter()
        .enumerate()
        .map(|(k, g)| {
            let phi = BoundaryMap::planted(g.clone());
            let pres = preserves_regular(&phi, 3, 50, 1e-6, k as u64).map_err(|e| e.to_string())?;
            if pres.pass_fraction < 1.0 {
                return Err(format!("g{k}: pass fraction {}", pres.pass_fraction));
            }
            let cfg =
                ConsensusConfig { seeds: 8, depth: 4, seed: 100 + k as u64, ..ConsensusConfig::default() };
            let h = consensus(&phi, 3, &cfg).map_err(|e| format!("g{k}: {e}"))?;
            let rho: Vec<_> = preset.generators.iter().map(|x| g.compose(x).compose(&g.inverse())).collect();
            verify_conjugacy(&h, &preset, &rho).map_err(|e| e.to_string())
        })
        .collect();
    let mut worst = 0.0_f64;
    for r in results {
        worst = worst.max(r?);
    }
    ensure(worst <= 1e-7, format!("worst conjugacy residual {worst:.2e} over 20 maps"))
}

fn no_coboundary() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let mut worst = 0.0_f64;
    let mut bad_sign = 0;
    for k in 0..100 {
        let n = 3 + k % 2;
        let count = rng.random_range(1..=n);
        let pts: Vec<IdealPoint<f64>> = (0..count).map(|_| random_ideal_point(n, &mut rng)).collect();
        let verts: Vec<Vertex<f64>> = pts.iter().cloned().map(Vertex::from).collect();
        let tau = reflect_in(&hyperplane_through(&verts).map_err(|e| e.to_string())?);
        bad_sign += usize::from(tau.sign() != -1);
        for p in &pts {
            worst = worst.max(tau.act_ideal(p).unwrap().chord(p));
        }
    }
    ensure(
        worst <= 1e-10 && bad_sign == 0,
        format!("max displacement {worst:.2e}, {bad_sign} reflections with ε ≠ −1"),
    )
}

fn barycenter_equivariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst = 0.0_f64;
    for k in 0..100 {
        let n = 2 + k % 3;
        let atoms = 3 + k % 5;
        let raw: Vec<f64> = (0..atoms).map(|_| 0.5 + rng.random::<f64>()).collect();
        let total: f64 = raw.iter().sum();
        let mu = BoundaryMeasure::new(
            raw.iter().map(|w| Atom { point: random_ideal_point(n, &mut rng), weight: w / total }).collect(),
        )
        .map_err(|e| e.to_string())?;
        let g = random_isometry::<f64, _>(n, 2.0, OrientationChoice::Any, &mut rng);
        let lhs =
            conformal_barycenter(&mu.pushforward(&g).unwrap(), 1e-13, 200).map_err(|e| e.to_string())?;
        let rhs = g.act_point(&conformal_barycenter(&mu, 1e-13, 200).map_err(|e| e.to_string())?).unwrap();
        worst = worst.max(lhs.distance(&rhs));
    }
    ensure(worst <= 1e-8, format!("max d(bary(g·μ), g·bary(μ)) = {worst:.2e}"))
}

fn convexity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut checked = 0usize;
    let mut escaped = 0usize;
    let mut margin = f64::INFINITY;
    for k in 0..100 {
        let n = 2 + k % 3;
        let center = random_ideal_point::<f64, _>(n, &mut rng);
        let ell = center.null_lift();
        // Horoball {x : −⟨x, ℓ⟩ < 1}, which passes through the basepoint.
        let depth = |v: &[f64]| -minkowski_dot(v, &ell);
        let mut verts: Vec<Vertex<f64>> = Vec::new();
        while verts.len() <= n {
            let p = random_point::<f64, _>(n, 3.0, &mut rng);
            if depth(p.coords()) < 1.0 {
                verts.push(p.into());
            }
        }
        if k % 4 == 0 {
            // The centre itself lies on the closure of every horoball at it.
            verts[0] = center.clone().into();
        }
        for _ in 0..100 {
            let raw: Vec<f64> = (0..=n).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
            let total: f64 = raw.iter().sum();
            let t: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let x = straighten(&verts, &t).map_err(|e| e.to_string())?;
            let d = depth(x.coords());
            checked += 1;
            escaped += usize::from(d.is_nan() || d >= 1.0);
            margin = margin.min(1.0 - d);
        }
    }
    ensure(escaped == 0, format!("{checked} points, {escaped} outside, smallest margin {margin:.2e}"))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("cocycle identity", cocycle),
        ("epsilon-equivariance", equivariance),
        ("maximality of the regular simplex", maximality),
        ("figure-eight covolume / v3 = 2", proportionality),
        ("smear of planted identity gives 1", || {
            smear_run(&BoundaryMap::planted(Isometry::identity(3)), 1.0, 15)
        }),
        ("orientation-reversing map gives -1", || smear_run(&BoundaryMap::planted(reflection(3)), -1.0, 16)),
        ("Milnor-Wood bound", milnor_wood),
        ("rigidity pipeline end to end", end_to_end),
        ("reflection through boundary points", no_coboundary),
        ("barycenter equivariance", barycenter_equivariance),
        ("straightening keeps horoballs", convexity),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.1}s]", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
