//! End-to-end runs of the binary: exit codes, JSON shape, determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn chevring(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chevring"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("chevring-smoke-{}-{name}", std::process::id()));
    p
}

#[test]
fn exhaustive_relations_pass_and_rerun_identically() {
    let args =
        ["relations", "--system", "A2", "--ring", "Z/5", "--rep", "standard", "--exhaustive"];
    let first = chevring(&args);
    assert_eq!(first.status.code(), Some(0));
    let v = stdout_json(&first);
    assert_eq!(v["pass"], serde_json::json!(true));
    assert_eq!(v["report"]["policy"], serde_json::json!("exhaustive"));
    let second = chevring(&args);
    assert_eq!(first.stdout, second.stdout, "reports must be byte-identical");
}

#[test]
fn malformed_ring_spec_exits_two() {
    let out = chevring(&["relations", "--system", "A2", "--ring", "Z/", "--rep", "adjoint"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("parse error at byte 2"), "{err}");
}

#[test]
fn commutator_constants_for_the_doubled_pair() {
    let out = chevring(&["constants", "--system", "B2", "--pair", "a1+a2,a2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let terms = v["terms"].as_array().expect("terms array");
    assert_eq!(terms.len(), 1);
    assert_eq!(terms[0]["coefficient"].as_i64().expect("int").abs(), 2);
}

#[test]
fn identity_images_decompose_to_trivial_factors() {
    let phi = tmp("identity.json");
    let common = ["--system", "A2", "--lattice", "sc", "--ring", "Z/5"];
    let mut args = vec!["auto", "identity"];
    args.extend_from_slice(&common);
    args.extend_from_slice(&["--out", phi.to_str().expect("utf8 path")]);
    assert_eq!(chevring(&args).status.code(), Some(0));
    let mut args = vec!["auto", "decompose"];
    args.extend_from_slice(&common);
    args.extend_from_slice(&["--input", phi.to_str().expect("utf8 path")]);
    let out = chevring(&args);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["outcome"], serde_json::json!("decomposed"));
    assert_eq!(v["ring_factor"], serde_json::json!("id"));
    assert_eq!(v["graph_factor"], serde_json::json!("id"));
    assert_eq!(v["central_trivial"], serde_json::json!(true));
    assert_eq!(v["verified"], serde_json::json!(true));
    let _ = std::fs::remove_file(&phi);
}

#[test]
fn sampled_automorphism_round_trips_through_files() {
    let phi = tmp("sample.json");
    let common = ["--system", "A2", "--lattice", "sc", "--ring", "Z/5"];
    let mut args = vec!["auto", "sample", "--seed", "11"];
    args.extend_from_slice(&common);
    args.extend_from_slice(&["--out", phi.to_str().expect("utf8 path")]);
    assert_eq!(chevring(&args).status.code(), Some(0));
    let written: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&phi).expect("file written"))
            .expect("phi is JSON");
    let mut args = vec!["auto", "decompose"];
    args.extend_from_slice(&common);
    args.extend_from_slice(&["--input", phi.to_str().expect("utf8 path")]);
    let out = chevring(&args);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["outcome"], serde_json::json!("decomposed"));
    assert_eq!(v["ring_factor"], written["factors"]["ring"]);
    assert_eq!(v["graph_factor"], written["factors"]["graph"]);
    let _ = std::fs::remove_file(&phi);
}

#[test]
fn even_characteristic_gate_exits_undecided() {
    let phi = tmp("gate.json");
    let common = ["--system", "A2", "--lattice", "sc", "--ring", "Z/2"];
    let mut args = vec!["auto", "identity"];
    args.extend_from_slice(&common);
    args.extend_from_slice(&["--out", phi.to_str().expect("utf8 path")]);
    assert_eq!(chevring(&args).status.code(), Some(0));
    let mut args = vec!["auto", "decompose"];
    args.extend_from_slice(&common);
    args.extend_from_slice(&["--input", phi.to_str().expect("utf8 path")]);
    let out = chevring(&args);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stdout_json(&out)["outcome"], serde_json::json!("out-of-theorem-scope"));
    let _ = std::fs::remove_file(&phi);
}

#[test]
fn localization_and_embedding_report() {
    let out = chevring(&["ring", "embed", "--spec", "Z/12"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["injective"], serde_json::json!(true));
    assert_eq!(v["maximal_ideals"], serde_json::json!(2));
    let out = chevring(&["ring", "info", "--spec", "loc(Z/12, (2))"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["size"], serde_json::json!("4"));
}

#[test]
fn matrix_ring_generation_verdict() {
    let out =
        chevring(&["generate", "check-mn", "--system", "A2", "--rep", "standard", "--ring", "Z/6"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["verdict"], serde_json::json!("full-matrix-algebra"));
}

#[test]
fn path_certificates_search_and_check() {
    let out = chevring(&[
        "generate", "path", "--system", "A7", "--weight", "w2", "--from", "e7+e8", "--label", "6",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["found"], serde_json::json!(true));
    assert_eq!(v["unit"]["col"], serde_json::json!(27));
    // A known-good certificate is accepted by the checker.
    let cert = tmp("cert.json");
    std::fs::write(&cert, r#"{"start": 27, "labels": [5, 6, 4]}"#).expect("write cert");
    let out = chevring(&[
        "generate",
        "path",
        "--system",
        "A7",
        "--weight",
        "w2",
        "--check",
        cert.to_str().expect("utf8 path"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["accepted"], serde_json::json!(true));
    let _ = std::fs::remove_file(&cert);
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let cfg = tmp("config.txt");
    std::fs::write(&cfg, "system = A2\nring = Z/5\nrep = standard\n# comment\n")
        .expect("write config");
    let out = chevring(&[
        "relations",
        "--config",
        cfg.to_str().expect("utf8 path"),
        "--exhaustive",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["report"]["ring"], serde_json::json!("Z/5"));
    // A flag overrides the config value.
    let out = chevring(&[
        "relations",
        "--config",
        cfg.to_str().expect("utf8 path"),
        "--ring",
        "Z/7",
        "--exhaustive",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["report"]["ring"], serde_json::json!("Z/7"));
    let _ = std::fs::remove_file(&cfg);
}
