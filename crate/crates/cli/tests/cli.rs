use std::path::Path;
use std::process::{Command, Output};

use hyprig::hypcore::Isometry;
use hyprig::lattice::load_preset;
use hyprig::linalg::Matrix;
use serde_json::Value;

fn hyprig(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyprig")).args(args).output().expect("binary runs")
}

fn json_out(args: &[&str]) -> Value {
    let out = hyprig(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn vn_matches_the_regular_tetrahedron() {
    let v = json_out(&["vn", "--n", "3"]);
    assert!((v["value"].as_f64().unwrap() - 1.0149416064096536).abs() < 1e-10);
    assert_eq!(v["config"]["command"], "vn");
}

#[test]
fn missing_seed_is_a_usage_error() {
    let out = hyprig(&["smear", "--preset", "figure_eight_3d", "--map", "planted-identity"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_map_is_a_usage_error() {
    let out = hyprig(&["smear", "--preset", "figure_eight_3d", "--map", "wiggly", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["flag"], "--map");
}

#[test]
fn domain_error_reports_json_and_exit_one() {
    let out = hyprig(&["vn", "--n", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "InvalidInput");
    let out = hyprig(&["preset", "verify", "nonexistent"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn preset_verify_reports_covolume() {
    let v = json_out(&["preset", "verify", "figure_eight_3d"]);
    let ratio = v["covolume"].as_f64().unwrap() / 1.0149416064096536;
    assert!((ratio - 2.0).abs() < 1e-9);
    assert_eq!(v["verified"], true);
}

#[test]
fn smear_of_planted_identity_is_one() {
    let v = json_out(&[
        "--threads",
        "2",
        "smear",
        "--preset",
        "test_reflection_2d",
        "--map",
        "planted-identity",
        "--seed",
        "5",
        "--samples",
        "4000",
        "--test-simplices",
        "3",
    ]);
    let lambda = v["lambda"]["value"].as_f64().unwrap();
    let tol = v["milnor_wood"]["tolerance"].as_f64().unwrap();
    assert!((lambda - 1.0).abs() <= tol, "{lambda} ± {tol}");
    assert_eq!(v["milnor_wood"]["maximal"], true);
}

#[test]
fn csv_sweep_has_one_row_per_count() {
    let out = hyprig(&[
        "smear",
        "--preset",
        "test_reflection_2d",
        "--map",
        "planted-reflection",
        "--seed",
        "1",
        "--csv",
        "--sweep",
        "500,1000",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "samples,value,std_error,bias_bound,tolerance");
    assert_eq!(lines.len(), 3);
    assert!(lines[2].starts_with("1000,-"));
}

#[test]
fn reconstruct_then_verify_conjugacy() {
    let dir = tempfile::tempdir().unwrap();
    let h_path = dir.path().join("h.json");
    let out = hyprig(&[
        "reconstruct",
        "--map",
        "planted-reflection",
        "--n",
        "3",
        "--seed",
        "9",
        "--out",
        h_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let h_json: Value = serde_json::from_str(&std::fs::read_to_string(&h_path).unwrap()).unwrap();
    let h_m: Matrix<f64> = serde_json::from_value(h_json["h"].clone()).unwrap();
    let h = Isometry::new(h_m).unwrap();

    let preset = load_preset::<f64>("figure_eight_3d").unwrap();
    let rho: Vec<Matrix<f64>> =
        preset.generators.iter().map(|g| h.compose(g).compose(&h.inverse()).matrix().clone()).collect();
    let rho_path = write(dir.path(), "rho.json", &serde_json::to_value(&rho).unwrap());
    let v = json_out(&[
        "verify-conjugacy",
        "--preset",
        "figure_eight_3d",
        "--h",
        h_path.to_str().unwrap(),
        "--rho",
        &rho_path,
    ]);
    assert_eq!(v["conjugate"], true);
    assert!(v["residual"].as_f64().unwrap() < 1e-9);

    // Conjugating by the wrong element is rejected.
    let plain: Vec<Matrix<f64>> = preset.generators.iter().map(|g| g.matrix().clone()).collect();
    let wrong = write(dir.path(), "wrong.json", &serde_json::to_value(&plain).unwrap());
    let v = json_out(&[
        "verify-conjugacy",
        "--preset",
        "figure_eight_3d",
        "--h",
        h_path.to_str().unwrap(),
        "--rho",
        &wrong,
    ]);
    assert_eq!(v["conjugate"], false);
}

#[test]
fn vol_reads_a_simplex_file() {
    let dir = tempfile::tempdir().unwrap();
    let s = serde_json::json!([[1.0, 0.0], [-0.5, 0.8660254037844386], [-0.5, -0.8660254037844386]]);
    let p = write(dir.path(), "s.json", &s);
    let v = json_out(&["vol", "--n", "2", "--simplex", &p]);
    assert!((v["value"].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn orbit_summary_and_preserves_regular() {
    let v = json_out(&["orbit", "--n", "2", "--depth", "2"]);
    assert!(v["simplices"].as_u64().unwrap() > 1);
    assert!(v.get("entries").is_none());
    let full = json_out(&["orbit", "--n", "2", "--depth", "1", "--full"]);
    let entries = full["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 4);
    assert_eq!(entries[1]["matrix"].as_array().unwrap().len(), 3);
    let v = json_out(&[
        "preserves-regular",
        "--map",
        "planted-identity",
        "--n",
        "3",
        "--trials",
        "20",
        "--seed",
        "1",
    ]);
    assert_eq!(v["pass_fraction"], 1.0);
    assert_eq!(v["orientation_mode"], "same");
}
