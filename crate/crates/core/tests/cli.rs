use std::fs;
use std::process::{Command, Output};

use shiftdyn::orbitstats::read_csv;

fn shiftdyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shiftdyn"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn orbit_csv_to_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("orbit.csv");
    let out = shiftdyn(&[
        "orbit", "--operator", "paper-blocks", "--vector", "e0", "--horizon", "23", "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("n,norm,partial_sum,cesaro_avg,norm_log2\n"));
    let rows = read_csv(&text).unwrap();
    assert_eq!(rows.len(), 23);
    assert_eq!(rows[22].partial_sum, 27.75);
}

#[test]
fn weight_spec_file_operator() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.json");
    fs::write(
        &path,
        r#"{"kind": "product_profile_dyadic", "exponents": {"-2": -1, "-1": 1}, "default": 0, "side": "bilateral"}"#,
    )
    .unwrap();
    let op = format!("@{}", path.display());
    let out = shiftdyn(&["products", "--operator", &op, "--to", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "n,product,exponent\n0,1.0,0\n1,2.0,1\n2,1.0,0\n3,1.0,0\n"
    );
}

#[test]
fn exit_codes_from_binary() {
    assert_eq!(shiftdyn(&["list-builtins"]).status.code(), Some(0));
    assert_eq!(shiftdyn(&["orbit", "--space", "l0"]).status.code(), Some(2));
    assert_eq!(shiftdyn(&["orbit", "--operator", "rolewicz:-2"]).status.code(), Some(2));
    let out = shiftdyn(&[
        "orbit", "--operator", "constant:2.0:bilateral", "--vector", "e0", "--horizon", "2000",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("step 1024"));
}

#[test]
fn sampled_sweep_reports_majority() {
    let out = shiftdyn(&[
        "classify", "--operator", "paper-blocks", "--horizon", "3000", "--samples", "2", "--seed", "3",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let summary: serde_json::Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert_eq!(summary["record"], "operator_summary");
    assert_eq!(summary["evidence_kind"], "sampled evidence");
    assert_eq!(text.lines().count(), 9 + 2 + 1);
}
