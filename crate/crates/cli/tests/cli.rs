use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::tempdir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_transverse-blowup"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary should run")
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout should be a JSON report")
}

#[test]
fn model_dump_matches_golden() {
    let out = run(&["model", "dump", "--n", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let path = golden("model_dump_n1.json");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, &out.stdout).unwrap();
    }
    let expected = fs::read_to_string(&path).expect("golden file present");
    assert_eq!(String::from_utf8(out.stdout).unwrap(), expected);
}

#[test]
fn reports_are_byte_identical_for_same_seed() {
    let args = [
        "cut",
        "--a",
        "2",
        "--b",
        "3",
        "--seed",
        "11",
        "--samples",
        "64",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let other = run(&[
        "cut",
        "--a",
        "2",
        "--b",
        "3",
        "--seed",
        "12",
        "--samples",
        "64",
    ]);
    assert_ne!(first.stdout, other.stdout);
}

#[test]
fn non_free_action_exits_one() {
    let out = run(&["cut", "--a", "2", "--b", "4"]);
    assert_eq!(out.status.code(), Some(1));
    let doc = report(&out);
    assert_eq!(doc["passed"], false);
    let detail = doc["checks"][0]["detail"].as_str().unwrap();
    assert!(detail.contains("action not free"), "{detail}");
    assert!(String::from_utf8_lossy(&out.stderr).contains("action not free"));
}

#[test]
fn tube_too_small_exits_one() {
    let out = run(&["cut", "--a", "3", "--b", "1", "--radius", "1.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(report(&out)["checks"][0]["detail"]
        .as_str()
        .unwrap()
        .contains("tube too small"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["cut", "--a", "x", "--b", "1"][..],
        &["model", "dump", "--n", "3"],
        &["model", "dump", "--r-min", "2"],
        &["frobnicate"],
        &["bw", "product", "--a", "1"],
        &["verify-all", "--samples", "0"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn negative_weights_parse() {
    let out = run(&["bw", "product", "--a", "-3", "--b", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["data"]["quotient"]["a"], -3);
}

#[test]
fn surgery_profile_csv() {
    let dir = tempdir().unwrap();
    let csv = dir.path().join("p.csv");
    let out = run(&[
        "blowup",
        "surgery",
        "--l",
        "1",
        "--emit-profile",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,H,dH"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 201);
    for w in rows.windows(2) {
        assert!(w[1][1] > w[0][1], "H not increasing at r = {}", w[1][0]);
    }
    // 17 significant digits
    let first = text.lines().nth(2).unwrap().split(',').next().unwrap();
    assert_eq!(first.split('e').next().unwrap().replace('.', "").len(), 17);
}

#[test]
fn report_file_and_timing() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = run(&[
        "bw",
        "product",
        "--a",
        "5",
        "--b",
        "7",
        "--report",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert!(doc.get("wall_time_s").is_none());
    assert_eq!(doc["command"][0], "bw");

    let timed = report(&run(&["bw", "product", "--a", "5", "--b", "7", "--timing"]));
    assert!(timed["wall_time_s"].as_f64().unwrap() >= 0.0);
}

#[test]
fn convex_path_csv() {
    let dir = tempdir().unwrap();
    let csv = dir.path().join("path.csv");
    let out = run(&[
        "uniq",
        "path",
        "--a",
        "1",
        "--b",
        "1",
        "--from",
        "surgery",
        "--to",
        "gromov",
        "--emit",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 34);
    for line in text.lines().skip(1) {
        let margin: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(margin > 0.0);
    }
}

#[test]
fn surgery_presentation_needs_unit_weight() {
    let out = run(&[
        "uniq",
        "path",
        "--a",
        "2",
        "--b",
        "1",
        "--from",
        "surgery",
        "--to",
        "cut",
        "--samples",
        "64",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let doc = report(&out);
    let cells = run(&["uniq", "compare", "--a", "2", "--b", "1", "--samples", "64"]);
    assert_eq!(cells.status.code(), Some(0));
    let verdicts: Vec<String> = report(&cells)["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["verdict"].as_str().unwrap().to_string())
        .collect();
    assert!(verdicts.iter().any(|v| v == "skipped"));
    assert_eq!(doc["passed"], false);
}

#[test]
fn verify_all_passes() {
    let out = run(&["verify-all", "--seed", "7"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc = report(&out);
    assert_eq!(doc["passed"], true);
    assert!(doc["checks"].as_array().unwrap().len() > 50);
}
