use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use hyprig::boundary::{conformal_barycenter, BoundaryMeasure};
use hyprig::hypcore::random::random_ideal_point;
use hyprig::hypcore::{convert, straighten, Isometry, Model, Vertex};
use hyprig::lattice::{default_truncation, list_presets, load_preset, truncation_error_bound, LatticePreset};
use hyprig::linalg::Matrix;
use hyprig::regref::{density_probe, orbit, reference_regular};
use hyprig::rigidity::{consensus, preserves_regular, verify_conjugacy, ConsensusConfig, RigidityTol};
use hyprig::smear::{milnor_wood_check, smear_integral, volume_ratio, McConfig, McEstimate};
use hyprig::volcocycle::{v_n, vol_defect, volume, IdealSimplex, QuadConfig};

use crate::args::*;
use crate::io::{read_json, CliError, Output};
use crate::maps::parse_map;

type Res = Result<Output, CliError>;

fn quad(q: &QuadArgs) -> QuadConfig {
    QuadConfig {
        order: q.quad_order,
        rel_tol: q.quad_rel_tol,
        abs_tol: q.quad_abs_tol,
        max_evals: q.quad_max_evals,
        ..QuadConfig::default()
    }
}

fn with_config(config: &Value, mut body: Value) -> Output {
    body["config"] = config.clone();
    Output::Json(body)
}

fn check_dim(flag: &str, n: usize, got: usize) -> Result<(), CliError> {
    if n == got {
        Ok(())
    } else {
        Err(CliError::usage(flag, format!("expected dimension {n}, input has {got}")))
    }
}

pub fn run(cmd: &Command, config: &Value) -> Res {
    match cmd {
        Command::Vol(a) => {
            let s: IdealSimplex<f64> = read_json(&a.simplex)?;
            check_dim("--n", a.n, s.dim())?;
            let r = volume(&s, &quad(&a.quad))?;
            Ok(with_config(config, json!({"value": r.value, "abs_error": r.abs_error, "method": r.method})))
        }
        Command::Vn(a) => {
            let r = v_n(a.n)?;
            Ok(with_config(
                config,
                json!({"n": a.n, "value": r.value, "abs_error": r.abs_error, "method": r.method}),
            ))
        }
        Command::CocycleCheck(a) => cocycle_check(a, config),
        Command::Straighten(a) => {
            let vs: Vec<Vertex<f64>> = read_json(&a.vertices)?;
            let model: Model = a.model.parse().map_err(|_| CliError::usage("--model", a.model.clone()))?;
            let p = straighten(&vs, &a.t)?;
            let coords = convert(p.coords(), Model::Hyperboloid, model)?;
            Ok(with_config(config, json!({"model": model, "point": coords})))
        }
        Command::Barycenter(a) => {
            let mu: BoundaryMeasure<f64> = read_json(&a.measure)?;
            let p = conformal_barycenter(&mu, a.tol, a.max_iter)?;
            let ball = convert(p.coords(), Model::Hyperboloid, Model::Poincare)?;
            Ok(with_config(config, json!({"hyperboloid": p.coords(), "poincare": ball})))
        }
        Command::Orbit(a) => {
            if a.orientation.abs() != 1 {
                return Err(CliError::usage("--orientation", "must be 1 or -1"));
            }
            let s = reference_regular::<f64>(a.n, a.orientation);
            let o = orbit(&s, a.depth, a.budget)?;
            let mut body = json!({
                "depth": o.depth,
                "simplices": o.entries.len(),
                "points": o.points.len(),
            });
            if a.full {
                body["entries"] = o
                    .entries
                    .iter()
                    .map(|e| {
                        json!({
                            "word": e.word.letters,
                            "matrix": e.word.resolved.matrix(),
                            "vertex_ids": e.vertex_ids,
                            "parent": e.parent,
                        })
                    })
                    .collect();
                body["point_coords"] = serde_json::to_value(&o.points).expect("points serialize");
            }
            Ok(with_config(config, body))
        }
        Command::DensityProbe(a) => {
            let m: Matrix<f64> = read_json(&a.target)?;
            let g = Isometry::new(m)?;
            let r = density_probe(a.n, &g, a.depth, a.budget)?;
            Ok(with_config(config, serde_json::to_value(r).expect("probe serializes")))
        }
        Command::Preset(p) => match &p.action {
            PresetAction::List => {
                let names: Vec<Value> = list_presets()
                    .into_iter()
                    .map(|name| match load_preset::<f64>(name) {
                        Ok(p) => json!({"name": name, "n": p.n, "verified": true}),
                        Err(e) => json!({"name": name, "verified": false, "error": e.to_string()}),
                    })
                    .collect();
                Ok(with_config(config, json!({"presets": names})))
            }
            PresetAction::Verify { name } => {
                let p = load_preset::<f64>(name)?;
                let t = default_truncation(&p);
                Ok(with_config(
                    config,
                    json!({
                        "name": p.name,
                        "n": p.n,
                        "verified": true,
                        "generators": p.generators.len(),
                        "relators": p.relators.len(),
                        "cells": p.cells.len(),
                        "cell_volumes": p.cell_volumes(),
                        "covolume": p.covolume(),
                        "cusps": p.cusps,
                        "default_truncation": t,
                        "truncation_bound": truncation_error_bound(&p, t),
                    }),
                ))
            }
        },
        Command::Smear(a) => smear(a, config, false),
        Command::VolOfRep(a) => smear(a, config, true),
        Command::PreservesRegular(a) => {
            let phi = parse_map(&a.map, a.n)?;
            let r = preserves_regular(&phi, a.n, a.trials, a.tol, a.seed)?;
            Ok(with_config(config, serde_json::to_value(r).expect("report serializes")))
        }
        Command::Reconstruct(a) => {
            let phi = parse_map(&a.map, a.n)?;
            let cfg = ConsensusConfig {
                seeds: a.seeds,
                depth: a.depth,
                tol: RigidityTol { image: a.image_tol, orbit: a.orbit_tol },
                agreement: a.agreement,
                window: a.window,
                seed: a.seed,
            };
            let h = consensus(&phi, a.n, &cfg)?;
            Ok(with_config(config, json!({"h": h.matrix(), "sign": h.sign()})))
        }
        Command::VerifyConjugacy(a) => {
            let p = load_preset::<f64>(&a.preset)?;
            let hv: Value = read_json(&a.h)?;
            let hm: Matrix<f64> = serde_json::from_value(hv.get("h").cloned().unwrap_or(hv))
                .map_err(|e| CliError::usage("--h", e.to_string()))?;
            let h = Isometry::new(hm)?;
            let rho_m: Vec<Matrix<f64>> = read_json(&a.rho)?;
            let rho = rho_m.into_iter().map(Isometry::new).collect::<Result<Vec<_>, _>>()?;
            let residual = verify_conjugacy(&h, &p, &rho)?;
            Ok(with_config(config, json!({"residual": residual, "conjugate": residual <= a.tol})))
        }
    }
}

fn cocycle_check(a: &CocycleArgs, config: &Value) -> Res {
    let q = quad(&a.quad);
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let (mut worst, mut worst_bound, mut failures) = (0.0_f64, 0.0_f64, 0usize);
    for _ in 0..a.tuples {
        let pts: Vec<_> = (0..a.n + 2).map(|_| random_ideal_point::<f64, _>(a.n, &mut rng)).collect();
        let d = vol_defect(&pts, &q)?;
        let allowed = d.abs_error.max(1e-9);
        failures += usize::from(d.value.abs() > allowed);
        worst = worst.max(d.value.abs());
        worst_bound = worst_bound.max(d.abs_error);
    }
    Ok(with_config(
        config,
        json!({"tuples": a.tuples, "max_defect": worst, "max_error_bound": worst_bound, "failures": failures}),
    ))
}

fn estimate_json(e: &McEstimate) -> Value {
    serde_json::to_value(e).expect("estimate serializes")
}

fn smear(a: &SmearArgs, config: &Value, scale_by_covolume: bool) -> Res {
    let preset: LatticePreset<f64> = load_preset(&a.preset)?;
    let phi = parse_map(&a.map, preset.n)?;
    let truncation = a.truncation.unwrap_or_else(|| default_truncation(&preset));
    let counts = if a.sweep.is_empty() { vec![a.samples] } else { a.sweep.clone() };
    let simplex: Option<IdealSimplex<f64>> = a.simplex.as_ref().map(|p| read_json(p)).transpose()?;
    if let Some(s) = &simplex {
        check_dim("--simplex", preset.n, s.dim())?;
    }
    let mut rows = Vec::new();
    let mut last = Value::Null;
    for &samples in &counts {
        let cfg =
            McConfig { samples, seed: a.seed, truncation: Some(truncation), quad: QuadConfig::default() };
        let (est, body) = match &simplex {
            Some(s) => {
                let e = smear_integral(&preset, &phi, s, &cfg)?;
                let vol = volume(s, &cfg.quad)?.value;
                (e.clone(), json!({"estimate": estimate_json(&e), "simplex_volume": vol}))
            }
            None => {
                let r = volume_ratio(&preset, &phi, &cfg, a.test_simplices)?;
                let lambda = r.lambda.clone();
                let mw = milnor_wood_check(&lambda);
                let mut body = json!({
                    "lambda": estimate_json(&lambda),
                    "per_simplex": r.per_simplex.iter().map(estimate_json).collect::<Vec<_>>(),
                    "consistent": r.consistent,
                    "milnor_wood": mw,
                    "test_simplices": r.test_simplices,
                });
                if scale_by_covolume {
                    let c = preset.covolume();
                    let v = McEstimate {
                        value: lambda.value * c,
                        std_error: lambda.std_error * c,
                        bias_bound: lambda.bias_bound * c,
                        ..lambda.clone()
                    };
                    body["vol_of_rep"] = estimate_json(&v);
                    (v, body)
                } else {
                    (lambda, body)
                }
            }
        };
        rows.push(vec![
            samples.to_string(),
            est.value.to_string(),
            est.std_error.to_string(),
            est.bias_bound.to_string(),
            est.tolerance().to_string(),
        ]);
        last = body;
    }
    if a.csv {
        let mut out =
            vec![["samples", "value", "std_error", "bias_bound", "tolerance"].map(String::from).to_vec()];
        out.extend(rows);
        return Ok(Output::Csv(out));
    }
    last["truncation"] = json!(truncation);
    last["covolume"] = json!(preset.covolume());
    Ok(with_config(config, last))
}
