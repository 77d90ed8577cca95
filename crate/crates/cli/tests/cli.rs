//! End-to-end tests of the binary: exit codes, artifact shape, determinism.

use fixmap_core::cplx::C;
use fixmap_core::factory::build_shift_automorphism;
use fixmap_core::json::MapJson;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fixmap"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON: {e}\nstdout: {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write_points(path: &Path) {
    std::fs::write(
        path,
        r#"[[{"re":2.0,"im":0.0},{"re":3.0,"im":0.0}],
            [{"re":4.0,"im":0.0},{"re":5.0,"im":0.0}],
            [{"re":0.0,"im":1.0},{"re":-1.0,"im":0.5}]]"#,
    )
    .unwrap();
}

#[test]
fn no_subcommand_is_usage_error() {
    let out = bin().output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = run(&["construct", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn construct_emits_verified_automorphism_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let points = dir.path().join("points.json");
    write_points(&points);
    let args = ["construct", "--points", points.to_str().unwrap(), "--seed", "7"];
    let first = run(&args);
    assert_eq!(first.status.code(), Some(0));
    let art = stdout_json(&first);
    assert_eq!(art["command"], "construct");
    assert_eq!(art["config"]["seed"], 7);
    assert!(art["config"]["tolerances"]["dedup_tol"].is_number());
    assert_eq!(art["result"]["verification"]["pass"], true);
    assert_eq!(
        art["result"]["structural_fixed_points"].as_array().unwrap().len(),
        3
    );
    // same seed, same bytes
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn fix_points_recovers_the_shift_set() {
    let dir = tempfile::tempdir().unwrap();
    let map_path = dir.path().join("h.json");
    let h = build_shift_automorphism(
        &[
            C::new(0.0, 0.0),
            C::new(1.0, 0.0),
            C::new(-1.0, 0.0),
            C::new(0.0, 2.0),
        ],
        2,
    )
    .unwrap();
    std::fs::write(&map_path, serde_json::to_string(&h.to_json()).unwrap()).unwrap();
    let out = run(&[
        "fix-points",
        "--map",
        map_path.to_str().unwrap(),
        "--box",
        "5",
        "--starts",
        "2000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let art = stdout_json(&out);
    assert_eq!(art["result"]["found"].as_array().unwrap().len(), 4);
}

#[test]
fn fix_points_accepts_bare_polymap_files() {
    let dir = tempfile::tempdir().unwrap();
    let map_path = dir.path().join("m.json");
    let h = build_shift_automorphism(&[C::new(0.0, 0.0), C::new(1.0, 0.0)], 2).unwrap();
    let expanded = h.expand_forward(10_000).unwrap();
    std::fs::write(
        &map_path,
        serde_json::to_string(&MapJson::from(&expanded)).unwrap(),
    )
    .unwrap();
    let out = run(&[
        "fix-points",
        "--map",
        map_path.to_str().unwrap(),
        "--box",
        "3",
        "--starts",
        "500",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let art = stdout_json(&out);
    assert_eq!(art["result"]["found"].as_array().unwrap().len(), 2);
}

#[test]
fn verify_detects_a_broken_inverse() {
    let dir = tempfile::tempdir().unwrap();
    let h = build_shift_automorphism(
        &[C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 2.0)],
        2,
    )
    .unwrap();
    let mut j = serde_json::to_value(h.to_json()).unwrap();
    // swap the inverse factor order: the pairs no longer invert each other
    let invs = j["inverse_factors"].as_array().unwrap().clone();
    j["inverse_factors"] = serde_json::Value::Array(vec![invs[1].clone(), invs[0].clone()]);
    let path = dir.path().join("broken.json");
    std::fs::write(&path, serde_json::to_string(&j).unwrap()).unwrap();
    let out = run(&["verify", "--automorphism", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn verify_passes_a_correct_automorphism() {
    let dir = tempfile::tempdir().unwrap();
    let h = build_shift_automorphism(&[C::new(0.0, 0.0), C::new(1.0, 0.0)], 2).unwrap();
    let path = dir.path().join("h.json");
    std::fs::write(&path, serde_json::to_string(&h.to_json()).unwrap()).unwrap();
    let out = run(&[
        "verify",
        "--automorphism",
        path.to_str().unwrap(),
        "--samples",
        "50",
        "--box",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let art = stdout_json(&out);
    assert_eq!(art["result"]["pass"], true);
}

#[test]
fn kobayashi_dist_matches_the_radial_closed_form() {
    let out = run(&[
        "kobayashi",
        "dist",
        "--z",
        r#"[{"re":0.0,"im":0.0},{"re":0.0,"im":0.0}]"#,
        "--w",
        r#"[{"re":0.5,"im":0.0},{"re":0.0,"im":0.0}]"#,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let art = stdout_json(&out);
    let d = art["result"]["distance"].as_f64().unwrap();
    assert!((d - 0.5f64.atanh()).abs() < 1e-14);
}

#[test]
fn shell_domain_witness_and_certificate() {
    let a = r#"[{"re":0.15,"im":0.05},{"re":0.02,"im":0.01}]"#;
    let b = r#"[{"re":0.3,"im":-0.1},{"re":0.12,"im":0.08}]"#;
    let out = run(&["shell-domain", "check-line", "--a", a, "--b", b]);
    assert_eq!(out.status.code(), Some(0));
    let art = stdout_json(&out);
    assert!(art["result"]["margin"].as_f64().unwrap() > 1e-6);

    let out = run(&["shell-domain", "certify", "--a", a, "--b", b]);
    assert_eq!(out.status.code(), Some(0));
    let art = stdout_json(&out);
    assert!(art["result"]["non_collinearity"].as_f64().unwrap() > 1e-8);
    assert_eq!(art["result"]["cap_boundary"], false);
}

#[test]
fn gallery_curve_and_annuli_counts() {
    let out = run(&[
        "gallery",
        "curve",
        "--roots",
        r#"[{"re":0.0,"im":0.0},{"re":1.0,"im":0.0},{"re":-1.0,"im":0.0}]"#,
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["result"]["count"], 3);

    let out = run(&["gallery", "annuli", "--radii", "[0.25,0.25,0.25]"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["result"]["count"], 8);

    let out = run(&["gallery", "strip", "--k", "3", "--samples", "500"]);
    assert_eq!(out.status.code(), Some(0));
    let art = stdout_json(&out);
    assert_eq!(art["result"]["escaped"], 0);
    assert_eq!(art["result"]["fixed_point"]["re"].as_f64().unwrap(), 3.5);
}

#[test]
fn linearize_annulus_is_exact() {
    let out = run(&["linearize", "--domain", "annulus", "--r", "0.25"]);
    assert_eq!(out.status.code(), Some(0));
    let art = stdout_json(&out);
    assert_eq!(art["result"]["phi_base_residual"].as_f64().unwrap(), 0.0);
    assert!(art["result"]["annulus"]["equivariance_residual"].as_f64().unwrap() < 1e-12);
}

#[test]
fn classify_family_from_map_files() {
    let dir = tempfile::tempdir().unwrap();
    let h = build_shift_automorphism(&[C::new(0.0, 0.0), C::new(1.0, 0.0)], 2).unwrap();
    let h_path = dir.path().join("h.json");
    std::fs::write(&h_path, serde_json::to_string(&h.to_json()).unwrap()).unwrap();
    let k_path = dir.path().join("k.json");
    std::fs::write(
        &k_path,
        r#"[[{"re":0.0,"im":0.0},{"re":0.0,"im":0.0}],
            [{"re":1.0,"im":0.0},{"re":0.0,"im":0.0}]]"#,
    )
    .unwrap();
    // K = Fix(H) and the family is {H}: H fixes exactly K, so neither
    let out = run(&[
        "classify",
        "--points",
        k_path.to_str().unwrap(),
        "--maps",
        h_path.to_str().unwrap(),
        "--samples",
        "100",
        "--box",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let art = stdout_json(&out);
    assert_eq!(art["result"]["verdict"], "neither");
    assert_eq!(art["result"]["witness"], 0);
}

#[test]
fn output_dir_env_var_resolves_bare_file_names() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "kobayashi",
            "dist",
            "--z",
            r#"[{"re":0.0,"im":0.0}]"#,
            "--w",
            r#"[{"re":0.3,"im":0.0}]"#,
            "--out",
            "dist.json",
        ])
        .env("FIXMAP_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let written = dir.path().join("dist.json");
    assert!(written.exists(), "artifact not written to the env-resolved dir");
    let art: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(written).unwrap()).unwrap();
    assert!((art["result"]["distance"].as_f64().unwrap() - 0.3f64.atanh()).abs() < 1e-14);
}
