//! End-to-end tests of the `hardy` binary: exit codes, diagnostics,
//! determinism and report round-tripping.

use std::path::Path;
use std::process::{Command, Output};

fn hardy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn fixtures(dir: &Path) -> (String, String, String) {
    let dist = write(
        dir,
        "uniform.json",
        r#"{"atoms":[],"segments":[{"lo":0.0,"hi":1.0,"mass":1.0}]}"#,
    );
    let psi = write(dir, "one.json", r#"{"breakpoints":[],"values":[1.0]}"#);
    let seq = write(dir, "seq.json", r#"{"terms":[1.0],"tail":"zeros"}"#);
    (dist, psi, seq)
}

#[test]
fn verify_satisfied_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let (dist, psi, _) = fixtures(dir.path());
    let out = hardy(&[
        "verify",
        "--theorem",
        "hardy-gt1",
        "--dist",
        &dist,
        "--psi",
        &psi,
        "--p",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["schema_version"], "1");
    assert_eq!(value["theorem"], "hardy-gt1");
    assert_eq!(value["satisfied"], true);
    assert_eq!(value["alpha"].as_f64(), Some(1.0));
}

#[test]
fn verify_bad_mass_exits_one_and_names_total() {
    let dir = tempfile::tempdir().unwrap();
    let (_, psi, _) = fixtures(dir.path());
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"atoms":[{"x":0.0,"mass":0.9}],"segments":[]}"#,
    );
    let out = hardy(&[
        "verify",
        "--theorem",
        "hardy-gt1",
        "--dist",
        &bad,
        "--psi",
        &psi,
        "--p",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("0.9"), "diagnostic should name the total: {err}");
}

#[test]
fn verify_malformed_json_exits_one_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let (_, psi, _) = fixtures(dir.path());
    let broken = write(dir.path(), "broken.json", "{\"atoms\": [\n  {\"x\": }\n]}");
    let out = hardy(&[
        "verify",
        "--theorem",
        "hardy-gt1",
        "--dist",
        &broken,
        "--psi",
        &psi,
        "--p",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line"), "diagnostic should carry a location: {err}");
}

#[test]
fn verify_regime_mismatch_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let (dist, psi, _) = fixtures(dir.path());
    let out = hardy(&[
        "verify",
        "--theorem",
        "hardy-gt1",
        "--dist",
        &dist,
        "--psi",
        &psi,
        "--p",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn report_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let (dist, _, _) = fixtures(dir.path());
    // A psi with irrational-looking values exercises the 17-digit rendering.
    let psi = write(
        dir.path(),
        "psi.json",
        r#"{"breakpoints":[0.3333333333333333],"values":[2.718281828459045,0.1]}"#,
    );
    let out_path = dir.path().join("report.json");
    let out = hardy(&[
        "verify",
        "--theorem",
        "hardy-gt1",
        "--dist",
        &dist,
        "--psi",
        &psi,
        "--p",
        "2.5",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    // Re-render every float from the parsed value and compare with the raw
    // text: bit-exact round trip of each field.
    for field in ["p", "lhs", "rhs_sharpened", "rhs_classic", "alpha", "margin", "quad_error"] {
        let parsed = value[field].as_f64().unwrap();
        let rendered = format!("{parsed:.16e}");
        assert!(
            text.contains(&rendered),
            "field {field}: {rendered} not found verbatim"
        );
    }
    // Field order is stable.
    let order = [
        "schema_version",
        "theorem",
        "\"p\"",
        "lhs",
        "rhs_sharpened",
        "rhs_classic",
        "alpha",
        "satisfied",
        "margin",
        "quad_error",
        "\"mc\"",
    ];
    let mut last = 0;
    for key in order {
        let at = text[last..].find(key).expect(key) + last;
        assert!(at >= last);
        last = at;
    }
}

#[test]
fn absent_alpha_is_null_not_zero() {
    let dir = tempfile::tempdir().unwrap();
    let (dist, psi, _) = fixtures(dir.path());
    let out = hardy(&[
        "verify",
        "--theorem",
        "hardy-lt1",
        "--dist",
        &dist,
        "--psi",
        &psi,
        "--p",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"alpha\": null"), "{text}");
}

#[test]
fn infinite_lhs_renders_as_string() {
    let dir = tempfile::tempdir().unwrap();
    let (_, psi, _) = fixtures(dir.path());
    let atoms = write(
        dir.path(),
        "atoms.json",
        r#"{"atoms":[{"x":1.0,"mass":0.5},{"x":2.0,"mass":0.5}],"segments":[]}"#,
    );
    let out = hardy(&[
        "verify",
        "--theorem",
        "hardy-lt1",
        "--dist",
        &atoms,
        "--psi",
        &psi,
        "--p",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(0), "trivially satisfied");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"lhs\": \"inf\""), "{text}");
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["satisfied"], true);
}

#[test]
fn mc_cross_check_embeds_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let (dist, psi, _) = fixtures(dir.path());
    let out = hardy(&[
        "verify",
        "--theorem",
        "copson",
        "--dist",
        &dist,
        "--psi",
        &psi,
        "--p",
        "2",
        "--mc-n",
        "100000",
        "--seed",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["mc"]["n"], 100000);
    assert_eq!(value["mc"]["seed"], 7);
    assert_eq!(value["mc"]["agrees"], true);
    let mean = value["mc"]["mean"].as_f64().unwrap();
    assert!((mean - 2.0).abs() < 0.05, "mc mean {mean}");
}

#[test]
fn transform_and_rearrange_outputs_parse_back() {
    let dir = tempfile::tempdir().unwrap();
    let mixed = write(
        dir.path(),
        "mixed.json",
        r#"{"atoms":[{"x":0.0,"mass":0.5}],"segments":[{"lo":1.0,"hi":2.0,"mass":0.5}]}"#,
    );
    let psi = write(
        dir.path(),
        "dec.json",
        r#"{"breakpoints":[1.0],"values":[2.0,1.0]}"#,
    );
    let out = hardy(&[
        "transform",
        "--kind",
        "stretch-up",
        "--dist",
        &mixed,
        "--psi",
        &psi,
        "--atom",
        "0",
        "--p",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let value: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("transform output is JSON");
    // The emitted dist is itself a valid input file.
    let dist_text = serde_json::to_string(&value["dist"]).unwrap();
    let again = write(dir.path(), "stretched.json", &dist_text);
    let psi_text = serde_json::to_string(&value["psi"]).unwrap();
    let psi_again = write(dir.path(), "psi2.json", &psi_text);
    let out = hardy(&[
        "verify",
        "--theorem",
        "hardy-gt1",
        "--dist",
        &again,
        "--psi",
        &psi_again,
        "--p",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");

    let out = hardy(&["transform", "--kind", "rearrange", "--psi", &psi]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn limit_study_small_k_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let seq = write(dir.path(), "seq3.json", r#"{"terms":[1.0,2.0,3.0],"tail":"zeros"}"#);
    let out = hardy(&["limit-study", "--seq", &seq, "--p", "2", "--k", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn limit_study_emits_csv() {
    let dir = tempfile::tempdir().unwrap();
    let (_, _, seq) = fixtures(dir.path());
    let out = hardy(&["limit-study", "--seq", &seq, "--p", "2", "--k", "10,100"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "K,scaled_lhs,scaled_rhs,alpha_K,gap_to_classic"
    );
    assert_eq!(lines.count(), 2);
}
