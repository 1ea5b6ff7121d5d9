//! End-to-end checks of the `cpg` binary.

use std::process::{Command, Output};

fn cpg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cpg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn classify_catalog_parabola() {
    let out = cpg(&["classify", "--catalog", "parabola"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["label"], "PARABOLA");
    assert_eq!(v["profile"]["ac_dim"], 1);
}

#[test]
fn hilbert_dist_matches_log3() {
    let out = cpg(&[
        "hilbert-dist", "--catalog", "ball2", "--p", "0,0", "--q", "0.5,0",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let d = v["distance"].as_f64().unwrap();
    assert!((d - 3.0f64.ln()).abs() < 1e-12);
}

#[test]
fn output_is_deterministic() {
    let a = cpg(&["classify", "--catalog", "paraboloid3"]);
    let b = cpg(&["classify", "--catalog", "paraboloid3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn unknown_catalog_name_exits_2_and_lists_names() {
    let out = cpg(&["classify", "--catalog", "no-such-domain"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("plane2") && err.contains("proper-cone4"));
}

#[test]
fn malformed_json_exits_2_with_position() {
    let dir = std::env::temp_dir().join("cpg-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(&path, "{\"type\": ").unwrap();
    let out = cpg(&["classify", "--domain", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("line") && err.contains("column"), "{err}");
}

#[test]
fn verify_foliation_passes_and_reports_seed() {
    let out = cpg(&[
        "verify", "foliation", "--catalog", "parabola-x-rplus", "--samples", "100", "--seed", "7",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["seed"], 7);
    assert_eq!(v["passed"], true);
}

#[test]
fn verify_unknown_suite_exits_2() {
    let out = cpg(&["verify", "nope", "--catalog", "parabola"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn catalog_lists_all_names() {
    let out = cpg(&["catalog"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let names: Vec<&str> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["name"].as_str().unwrap())
        .collect();
    assert_eq!(names.len(), 22);
    for expected in [
        "plane2", "quadrant", "parabola", "paraboloid3", "simplex-cone3",
        "elliptic-cone3", "cone3-x-r", "proper-cone4", "ball2", "hyperbola",
    ] {
        assert!(names.contains(&expected), "missing {expected}");
    }
}

#[test]
fn catalog_entry_round_trips_through_domain_json() {
    let out = cpg(&["catalog", "--name", "paraboloid3-x-r"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let dir = std::env::temp_dir().join("cpg-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("roundtrip.json");
    std::fs::write(&path, serde_json::to_string(&v["domain"]).unwrap()).unwrap();
    let back = cpg(&["classify", "--domain", path.to_str().unwrap()]);
    assert!(back.status.success());
    let c: serde_json::Value = serde_json::from_str(&stdout(&back)).unwrap();
    assert_eq!(c["label"], "PARABOLOID3_x_R");
}

#[test]
fn flow_writes_csv_trace() {
    let dir = std::env::temp_dir().join("cpg-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("trace.csv");
    let out = cpg(&[
        "flow", "--catalog", "parabola", "--x", "0.5,1", "--t", "1",
        "--trace", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,x1,x2"));
    assert_eq!(lines.count(), 33);
}

#[test]
fn limit_analyze_inline_sequence() {
    let out = cpg(&[
        "limit-analyze", "--catalog", "parabola",
        "--sequence", "{\"kind\":\"diag-powers\",\"entries\":[0.5,0.25]}",
        "--steps", "40", "--probes", "50",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["converged"], true);
    assert_eq!(v["singular"], true);
    assert_eq!(v["kernel_verdict"], "holds");
    assert_eq!(v["kernel_meets_interior"], false);
}

#[test]
fn table_format_renders_rows() {
    let out = cpg(&["classify", "--catalog", "quadrant", "--format", "table"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("label") && text.contains("QUADRANT"));
}
