use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn mixflag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mixflag"))
        .args(args)
        .output()
        .expect("run mixflag")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON output")
}

#[test]
fn a2_tilting_table() {
    let out = mixflag(&["tables", "--kind", "tilting", "--type", "A2"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    let labels: Vec<&str> = rows.iter().map(|r| r["w"].as_str().unwrap()).collect();
    assert_eq!(labels, ["e", "1", "2", "1,2", "2,1", "1,2,1"]);
    let top = &rows[5]["class"]["coeffs"];
    assert_eq!(
        top,
        &json!({
            "e": {"3": 1}, "1": {"2": 1}, "2": {"2": 1},
            "1,2": {"1": 1}, "2,1": {"1": 1}, "1,2,1": {"0": 1}
        })
    );
}

#[test]
fn a1_simple_table() {
    let out = mixflag(&["tables", "--kind", "simple", "--type", "A1"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["rows"][0]["class"]["coeffs"], json!({"e": {"0": 1}}));
    assert_eq!(
        doc["rows"][1]["class"]["coeffs"],
        json!({"1": {"0": 1}, "e": {"-1": -1}})
    );
}

#[test]
fn csv_cells() {
    let out = mixflag(&["tables", "--kind", "parity", "--type", "A1", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "w,e,1\ne,1*v^0,0\n1,-1*v^-1,1*v^0\n");
}

#[test]
fn missing_table_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("out.json");
    let out = mixflag(&[
        "tables",
        "--kind",
        "parity",
        "--type",
        "A2",
        "--char",
        "2",
        "--pcan",
        "/nonexistent/pcan.json",
        "--pcan-dual",
        "/nonexistent/pcan.json",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_path.exists());
    assert!(out.stdout.is_empty());

    let out = mixflag(&["tables", "--kind", "parity", "--type", "A2", "--char", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = mixflag(&["tables", "--kind", "parity"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mismatched_table_type_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a1.json");
    fs::write(&path, mixflag(&["export-pcan", "--type", "A1"]).stdout).unwrap();
    let p = path.to_str().unwrap();
    let out = mixflag(&[
        "tables",
        "--kind",
        "parity",
        "--type",
        "A2",
        "--pcan",
        p,
        "--pcan-dual",
        p,
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("A1"), "{err}");
}

#[test]
fn check_suites_pass() {
    for args in [
        &["check", "--suite", "identities", "--type", "B2"][..],
        &["check", "--suite", "calibration"][..],
        &["check", "--suite", "perversity", "--type", "A2"][..],
    ] {
        let out = mixflag(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        let doc = stdout_json(&out);
        assert_eq!(doc["pass"], json!(true));
        assert!(doc["checks"]
            .as_array()
            .unwrap()
            .iter()
            .all(|c| c["pass"] == json!(true)));
    }
}

fn write_table(path: &Path, characteristic: u64, s_entry: Value) {
    let doc = json!({
        "cartan_type": "A1",
        "characteristic": characteristic,
        "entries": [
            {"w": [], "expansion": [{"y": [], "coeffs": {"0": 1}}]},
            {"w": [1], "expansion": s_entry},
        ]
    });
    fs::write(path, doc.to_string()).unwrap();
}

#[test]
fn perversity_failure_reports_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a1-p2.json");
    // b_s + (v + v^-1) b_e
    write_table(
        &path,
        2,
        json!([{"y": [1], "coeffs": {"0": 1}}, {"y": [], "coeffs": {"1": 2, "-1": 1}}]),
    );
    let p = path.to_str().unwrap();
    let out = mixflag(&[
        "check",
        "--suite",
        "perversity",
        "--type",
        "A1",
        "--char",
        "2",
        "--pcan",
        p,
        "--pcan-dual",
        p,
    ]);
    assert_eq!(out.status.code(), Some(1));
    let doc = stdout_json(&out);
    assert_eq!(doc["pass"], json!(false));
    let failing = &doc["checks"][1];
    assert_eq!(failing["pass"], json!(false));
    assert!(failing["detail"].as_str().unwrap().contains("<1>"));
}

#[test]
fn invalid_table_names_the_failed_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    write_table(
        &path,
        2,
        json!([{"y": [1], "coeffs": {"0": 1}}, {"y": [], "coeffs": {"1": 2}}]),
    );
    let p = path.to_str().unwrap();
    let out = mixflag(&[
        "tables",
        "--kind",
        "tilting",
        "--type",
        "A1",
        "--char",
        "2",
        "--pcan",
        p,
        "--pcan-dual",
        p,
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("bar-invariance"), "{err}");
}

#[test]
fn warm_cache_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let args = [
        "tables",
        "--kind",
        "projective",
        "--type",
        "B2",
        "--format",
        "csv",
        "--cache",
        cache.to_str().unwrap(),
    ];
    let cold = mixflag(&args);
    assert_eq!(cold.status.code(), Some(0));
    let cache_file = cache.join("kl-B2.json");
    assert!(cache_file.exists());
    assert!(cache.join("kl-C2.json").exists());
    let warm = mixflag(&args);
    assert_eq!(warm.status.code(), Some(0));
    assert_eq!(cold.stdout, warm.stdout);
    assert!(warm.stderr.is_empty());
    let uncached = mixflag(&args[..args.len() - 2]);
    assert_eq!(uncached.stdout, cold.stdout);
}

#[test]
fn corrupted_cache_is_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let args = [
        "tables",
        "--kind",
        "tilting",
        "--type",
        "A2",
        "--cache",
        cache.to_str().unwrap(),
    ];
    let reference = mixflag(&args);
    let file = cache.join("kl-A2.json");
    let mut doc: Value = serde_json::from_str(&fs::read_to_string(&file).unwrap()).unwrap();
    doc["entries"]["A/2/1,2,1"]["e"] = json!({"3": 5});
    fs::write(&file, doc.to_string()).unwrap();

    let out = mixflag(&args);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(out.stdout, reference.stdout);
    assert!(String::from_utf8(out.stderr).unwrap().contains("corrupted"));
    let repaired: Value = serde_json::from_str(&fs::read_to_string(&file).unwrap()).unwrap();
    assert_eq!(repaired["entries"]["A/2/1,2,1"]["e"], json!({"3": 1}));

    fs::write(&file, "not json").unwrap();
    let out = mixflag(&args);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(out.stdout, reference.stdout);
}

#[test]
fn hilbert_series() {
    let out = mixflag(&["hilbert", "--type", "A1"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["total"], json!({"0": 2, "1": 2, "2": 1}));
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    let out = mixflag(&[
        "tables",
        "--kind",
        "tilting",
        "--type",
        "A1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["kind"], json!("tilting"));
}

#[test]
fn wrong_cache_entry_with_valid_checksum_is_rejected() {
    use sha2::{Digest, Sha256};

    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let args = [
        "tables",
        "--kind",
        "parity",
        "--type",
        "A2",
        "--cache",
        cache.to_str().unwrap(),
    ];
    let reference = mixflag(&args);
    let file = cache.join("kl-A2.json");
    let mut doc: Value = serde_json::from_str(&fs::read_to_string(&file).unwrap()).unwrap();
    doc["entries"]["A/2/1,2,1"]["e"] = json!({"3": 2});
    let digest = Sha256::digest(serde_json::to_vec(&doc["entries"]).unwrap());
    doc["checksum"] = json!(hex::encode(digest));
    fs::write(&file, doc.to_string()).unwrap();

    let out = mixflag(&args);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(out.stdout, reference.stdout);
    assert!(String::from_utf8(out.stderr).unwrap().contains("wrong entry"));
}
