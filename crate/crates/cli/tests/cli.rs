use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const CANONICAL3: &str = r#"{"dim": 3, "name": "canonical3", "boundary": [
    {"indices": [0], "values": [1.0]},
    {"indices": [1], "values": [1.0]},
    {"indices": [2], "values": [1.0]}]}"#;

const THREE: &str = r#"{"dim": 2, "name": "three", "boundary": [
    {"indices": [0], "values": [1.0]},
    {"indices": [1], "values": [1.0]},
    {"indices": [0, 1], "values": [0.8, 0.6]}]}"#;

fn workspace() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c3.json"), CANONICAL3).unwrap();
    fs::write(dir.path().join("three.json"), THREE).unwrap();
    dir
}

fn run(dir: &Path, args: &[&str]) -> Output {
    run_with(dir, args, None)
}

fn run_with(dir: &Path, args: &[&str], cap: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_normforge"));
    cmd.args(args).current_dir(dir).env_remove("NORMFORGE_DIM_CAP");
    if let Some(cap) = cap {
        cmd.env("NORMFORGE_DIM_CAP", cap);
    }
    cmd.output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn csv_column(path: &Path, column: &str) -> Vec<f64> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let index = reader.headers().unwrap().iter().position(|h| h == column).unwrap();
    reader.records().map(|r| r.unwrap()[index].parse().unwrap()).collect()
}

#[test]
fn approximate_then_verify_canonical() {
    let dir = workspace();
    let out = run(
        dir.path(),
        &[
            "approximate",
            "--norm",
            "c3.json",
            "--epsilon",
            "0.1",
            "--out",
            "a.json",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let approx: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("a.json")).unwrap()).unwrap();
    assert_eq!(approx["elements"].as_array().unwrap().len(), 3);
    assert_eq!(approx["boundary"][0]["values"][0], 1.05);

    let out = run(
        dir.path(),
        &[
            "verify",
            "--norm",
            "c3.json",
            "--approx",
            "a.json",
            "--epsilon",
            "0.1",
            "--csv",
            "s.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["command"], "verify");
    assert_eq!(r["summary"]["passed"], true);
    let ratios = csv_column(&dir.path().join("s.csv"), "ratio");
    assert_eq!(ratios.len(), 16);
    assert!(ratios.iter().all(|&q| q == 1.05));
}

#[test]
fn approx_file_reads_as_a_norm() {
    let dir = workspace();
    run(
        dir.path(),
        &[
            "approximate",
            "--norm",
            "three.json",
            "--epsilon",
            "0.5",
            "--out",
            "a.json",
        ],
    );
    let out = run(dir.path(), &["analyze", "--norm", "a.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["summary"]["exposed_pairs"], 3);
}

#[test]
fn corrupted_approx_fails_verification() {
    let dir = workspace();
    run(
        dir.path(),
        &[
            "approximate",
            "--norm",
            "three.json",
            "--epsilon",
            "0.5",
            "--out",
            "a.json",
        ],
    );
    let text = fs::read_to_string(dir.path().join("a.json")).unwrap();
    let mut approx: Value = serde_json::from_str(&text).unwrap();

    // shrink the scaled (0.8, 0.6) element by 10%
    let mut shrunk = approx.clone();
    for e in shrunk["elements"].as_array_mut().unwrap() {
        if e["source_index"] == 2 {
            for v in e["values"].as_array_mut().unwrap() {
                *v = Value::from(v.as_f64().unwrap() * 0.9);
            }
        }
    }
    fs::write(dir.path().join("shrunk.json"), shrunk.to_string()).unwrap();
    let out = run(
        dir.path(),
        &[
            "verify",
            "--norm",
            "three.json",
            "--approx",
            "shrunk.json",
            "--epsilon",
            "0.5",
        ],
    );
    assert_eq!(out.status.code(), Some(4));
    let r = report(&out);
    assert_eq!(r["summary"]["passed"], false);
    let failed: Vec<&str> = r["results"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|x| x["pass"] == false)
        .map(|x| x["name"].as_str().unwrap())
        .collect();
    assert!(failed.iter().any(|n| n.starts_with("sandwich")), "{failed:?}");

    // drop every element: no norm left to verify, header-only CSV
    approx["elements"] = Value::Array(vec![]);
    fs::write(dir.path().join("empty.json"), approx.to_string()).unwrap();
    let out = run(
        dir.path(),
        &[
            "verify",
            "--norm",
            "three.json",
            "--approx",
            "empty.json",
            "--epsilon",
            "0.5",
            "--csv",
            "e.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(
        fs::read_to_string(dir.path().join("e.csv")).unwrap(),
        "vertex_id,source_norm,approx_norm,ratio,lower_margin,upper_margin\n"
    );
}

#[test]
fn epsilon_mismatch_is_reported() {
    let dir = workspace();
    run(
        dir.path(),
        &[
            "approximate",
            "--norm",
            "c3.json",
            "--epsilon",
            "0.1",
            "--out",
            "a.json",
        ],
    );
    let out = run(
        dir.path(),
        &["verify", "--norm", "c3.json", "--approx", "a.json", "--epsilon", "0.2"],
    );
    assert_eq!(out.status.code(), Some(4));
    let r = report(&out);
    let first = &r["results"][0];
    assert_eq!(
        (first["name"].as_str(), first["pass"].as_bool()),
        (Some("epsilon_matches"), Some(false))
    );
}

#[test]
fn level_reports_tables_and_identities() {
    let dir = workspace();
    fs::write(
        dir.path().join("f.json"),
        r#"{"dim": 3, "indices": [0, 1, 2], "values": [0.5, 0.5, 0.25]}"#,
    )
    .unwrap();
    let out = run(dir.path(), &["level", "--norm", "c3.json", "--functional", "f.json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["summary"]["depth"], 2);
    assert_eq!(r["details"]["h"][0]["h"]["values"], serde_json::json!([0.25, 0.25]));
    assert_eq!(r["details"]["j"][0]["j"]["values"], serde_json::json!([0.5, 0.5, 0.25]));
    assert_eq!(r["details"]["lambda"][0]["weights"][0]["lambda"], 1.0);

    let out = run(
        dir.path(),
        &["level", "--norm", "c3.json", "--functional", "f.json", "--n", "2"],
    );
    assert_eq!(report(&out)["details"]["h"].as_array().unwrap().len(), 1);
    let out = run(
        dir.path(),
        &["level", "--norm", "c3.json", "--functional", "f.json", "--n", "3"],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn level_rejects_zero_functional() {
    let dir = workspace();
    fs::write(dir.path().join("z.json"), r#"{"dim": 3, "indices": [], "values": []}"#).unwrap();
    let out = run(dir.path(), &["level", "--norm", "c3.json", "--functional", "z.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("zero functional"));
}

#[test]
fn smooth_reports_and_needs_a_seed() {
    let dir = workspace();
    let out = run(
        dir.path(),
        &[
            "smooth",
            "--norm",
            "three.json",
            "--epsilon",
            "0.5",
            "--samples",
            "300",
            "--seed",
            "9",
            "--csv",
            "sm.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["summary"]["p"], 4);
    let ratio = csv_column(&dir.path().join("sm.csv"), "ratio");
    assert_eq!(ratio.len(), 300);
    assert!(ratio.iter().all(|&q| (1.0 - 1e-9..=1.5 + 1e-9).contains(&q)));

    let out = run(dir.path(), &["smooth", "--norm", "three.json", "--epsilon", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn analyze_canonical() {
    let dir = workspace();
    let out = run(dir.path(), &["analyze", "--norm", "c3.json", "--csv", "e.csv"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["summary"]["exposed_points"], 6);
    assert_eq!(
        r["details"]["classes"],
        serde_json::json!([{"n": 1, "m": 1, "points": [0, 1, 2, 3, 4, 5]}])
    );
    assert!(csv_column(&dir.path().join("e.csv"), "radius")
        .iter()
        .all(|&r| r == 0.5));
}

#[test]
fn analyze_reports_non_vertex_representatives() {
    let dir = workspace();
    let spec = r#"{"dim": 2, "name": "mid", "boundary": [
        {"indices": [0, 1], "values": [1.0, 1.0]},
        {"indices": [0, 1], "values": [1.0, -1.0]},
        {"indices": [0], "values": [1.0]}]}"#;
    fs::write(dir.path().join("mid.json"), spec).unwrap();
    let out = run(dir.path(), &["analyze", "--norm", "mid.json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["summary"]["exposed_pairs"], 2);
    assert_eq!(r["details"]["rejected"][0]["reason"], "not_a_dual_vertex");
}

#[test]
fn exit_codes() {
    let dir = workspace();
    assert_eq!(run(dir.path(), &["bogus"]).status.code(), Some(1));
    assert_eq!(
        run(dir.path(), &["analyze", "--norm", "c3.json", "--frobnicate"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(run(dir.path(), &["--help"]).status.code(), Some(0));
    assert_eq!(run(dir.path(), &["--version"]).status.code(), Some(0));
    assert_eq!(
        run(
            dir.path(),
            &[
                "approximate",
                "--norm",
                "c3.json",
                "--epsilon",
                "1.5",
                "--out",
                "a.json"
            ]
        )
        .status
        .code(),
        Some(1)
    );

    fs::write(dir.path().join("bad.json"), "{\"dim\": 3,").unwrap();
    let out = run(dir.path(), &["analyze", "--norm", "bad.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.json:1:"));
    assert_eq!(
        run(dir.path(), &["analyze", "--norm", "missing.json"]).status.code(),
        Some(2)
    );

    fs::write(
        dir.path().join("dominated.json"),
        r#"{"dim": 2, "name": "d", "boundary": [{"indices": [0], "values": [1.0]}, {"indices": [1], "values": [1.0]}, {"indices": [0], "values": [0.5]}]}"#,
    )
    .unwrap();
    assert_eq!(
        run(dir.path(), &["analyze", "--norm", "dominated.json"]).status.code(),
        Some(2)
    );
}

#[test]
fn dimension_cap_from_environment() {
    let dir = workspace();
    assert_eq!(
        run_with(dir.path(), &["analyze", "--norm", "c3.json"], Some("2"))
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        run_with(dir.path(), &["analyze", "--norm", "c3.json"], Some("3"))
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        run_with(dir.path(), &["analyze", "--norm", "c3.json"], Some("zero"))
            .status
            .code(),
        Some(1)
    );

    let boundary: Vec<String> = (0..7)
        .map(|i| format!(r#"{{"indices": [{i}], "values": [1.0]}}"#))
        .collect();
    let spec = format!(r#"{{"dim": 7, "name": "c7", "boundary": [{}]}}"#, boundary.join(","));
    fs::write(dir.path().join("c7.json"), spec).unwrap();
    assert_eq!(
        run(dir.path(), &["analyze", "--norm", "c7.json"]).status.code(),
        Some(3)
    );
    assert_eq!(
        run_with(dir.path(), &["analyze", "--norm", "c7.json"], Some("7"))
            .status
            .code(),
        Some(0)
    );
}
