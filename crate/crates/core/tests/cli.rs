//! End-to-end tests of the `cpa` binary.

use std::path::Path;
use std::process::{Command, Output};

fn cpa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cpa")).args(args).output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_identical_squeezed_inputs() {
    let out = cpa(&["analyze", "--xi", "0.5", "--alpha-mag", "1", "--gaussian"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    // [DERIVED] coherence fully absorbed; i_out from the Gaussian engine 0.2715403174076219
    assert!((v["report"]["coeff_c"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["report"]["i_out"].as_f64().unwrap() - 0.2715403174076219).abs() < 1e-12);
    assert!((v["output_state"]["optical_purity"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert!((v["output_state"]["optical_intensity"].as_f64().unwrap() - 0.2715403174076219).abs() < 1e-12);
}

#[test]
fn analyze_single_coherent_beam() {
    let v = json(&cpa(&["analyze", "--alpha-sq", "4", "--single-beam"]));
    // [PAPER] half of a single beam's coherence is absorbed
    assert!((v["report"]["coeff_c"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn analyze_custom_splitter_and_second_beam() {
    let v = json(&cpa(&[
        "analyze", "--alpha-mag", "1", "--alpha-mag2", "0.5", "--theta2", "-1.2", "--xi2", "-0.3",
        "--t-re", "0.6", "--r-re", "-0.3",
    ]));
    // [DERIVED] 𝒜 = 1 − |t|² − |r|² = 0.55
    assert!((v["report"]["incoherent"].as_f64().unwrap() - 0.55).abs() < 1e-15);
    assert!(v["report"]["identity_residual"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn analyze_errors_are_structured() {
    let out = cpa(&["analyze", "--alpha-mag", "0", "--single-beam"]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "ZeroCoherenceInput");

    let out = cpa(&["analyze", "--t-re", "0.9", "--r-re", "0.9"]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "NonPassive");

    assert_eq!(cpa(&["analyze", "--frobnicate"]).status.code(), Some(2));
}

#[test]
fn sweep_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for (format, ext) in [("csv", "csv"), ("json", "json")] {
        let a = dir.path().join(format!("a.{ext}"));
        let b = dir.path().join(format!("b.{ext}"));
        for p in [&a, &b] {
            let out = cpa(&["sweep", "--target", "fig4", "--format", format, "--out", path(p)]);
            assert_eq!(out.status.code(), Some(0));
        }
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }
}

#[test]
fn sweep_fig3b_row_at_zero() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("fig3b.csv");
    let v = json(&cpa(&["sweep", "--target", "fig3b", "--out", path(&file)]));
    assert_eq!(v["rows"], 501);
    let text = std::fs::read_to_string(&file).unwrap();
    // [TRIVIAL] ξ = 0 row gives 1 exactly
    assert!(text.lines().any(|l| l == "0.0000000000000000e0,1.0000000000000000e0"));
}

#[test]
fn sweep_json_output_parses() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("fig5.json");
    cpa(&["sweep", "--target", "fig5", "--format", "json", "--out", path(&file)]);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    assert_eq!(v["target"], "fig5");
    assert_eq!(v["rows"].as_array().unwrap().len(), 4 * 501);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out_file = dir.path().join("custom.csv");
    std::fs::write(
        &cfg,
        format!(
            "target = \"custom\"\nout = \"{}\"\naxis = [\"xi1=-1:1:5\"]\n[fixed]\nalpha1 = 1.0\nalpha2 = 1.0\nxi2 = 0.5\n",
            path(&out_file)
        ),
    )
    .unwrap();
    let v = json(&cpa(&["sweep", "--config", path(&cfg), "--axis", "xi1=-1:1:3"]));
    // flag axis wins over the config axis
    assert_eq!(v["rows"], 3);
    let text = std::fs::read_to_string(&out_file).unwrap();
    assert_eq!(text.lines().next(), Some("xi1,coeff_c,coeff_i"));

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "colour = \"red\"\n").unwrap();
    let out = cpa(&["analyze", "--config", path(&bad)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn io_failures_exit_with_3() {
    let out = cpa(&["sweep", "--target", "fig3b", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(out.status.code(), Some(3));
    let out = cpa(&["analyze", "--config", "/nonexistent-dir/cfg.toml"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn invalid_sweep_spec_names_field() {
    let out = cpa(&["sweep", "--target", "fig3b", "--axis", "xi=-30:30:11", "--out", "/tmp/unused.csv"]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "InvalidSpec");
    assert!(err["message"].as_str().unwrap().contains("axes.xi"));
}

#[test]
fn verify_formulas_report() {
    let out = cpa(&["verify", "--scope", "formulas", "--seed", "42"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["seed"], 42);
    let checks = v["checks"].as_array().unwrap();
    let identity = checks
        .iter()
        .find(|c| c["name"].as_str().unwrap().starts_with("identity"))
        .unwrap();
    assert_eq!(identity["samples"], 1000);
    assert!(identity["max_residual"].as_f64().unwrap() < 1e-12);
    for c in checks {
        for key in ["name", "engines", "samples", "max_residual", "tolerance", "pass"] {
            assert!(c.get(key).is_some(), "missing {key}");
        }
    }
    // [TRIVIAL] same seed, same bytes
    assert_eq!(out.stdout, cpa(&["verify", "--scope", "formulas", "--seed", "42"]).stdout);
}

#[test]
fn verify_gaussian_and_fock_scopes() {
    let v = json(&cpa(&["verify", "--scope", "gaussian", "--seed", "7"]));
    assert_eq!(v["pass"], true);
    let defect = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"].as_str().unwrap().contains("factorization"))
        .unwrap();
    assert_eq!(defect["samples"], 200);

    let out = cpa(&["verify", "--scope", "fock", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let moments = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"].as_str().unwrap().contains("moments match Gaussian"))
        .unwrap();
    assert!(moments["max_residual"].as_f64().unwrap() < 1e-6);
    assert!(moments["leakage"].as_f64().is_some());
}
