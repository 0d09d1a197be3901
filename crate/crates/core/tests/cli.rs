use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_normplane"))
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn strip_timing(s: &str) -> String {
    s.lines()
        .filter(|l| !l.trim_start().starts_with("\"timing_ms\""))
        .collect::<Vec<_>>()
        .join("\n")
}

fn run_stdin(args: &[&str], input: &str) -> (i32, String, String) {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn golden_results_are_stable() {
    for (name, code) in [("chebyshev", 0), ("two_center", 0), ("bad_norm", 2)] {
        let job = golden_dir().join(format!("{name}.job.json"));
        let out = bin().arg("--input").arg(&job).output().unwrap();
        assert_eq!(out.status.code(), Some(code), "{name}");
        let want = std::fs::read_to_string(golden_dir().join(format!("{name}.expected.json"))).unwrap();
        assert_eq!(strip_timing(&String::from_utf8(out.stdout).unwrap()), strip_timing(&want), "{name}");
    }
}

#[test]
fn two_center_no_exits_with_one() {
    let job = r#"{"norm":{"type":"lp","p":2},"points":[[0,0],[0,2],[10,0],[10,2]],"r1":0.9,"r2":0.5}"#;
    let (code, out, _) = run_stdin(&["two-center"], job);
    assert_eq!(code, 1);
    assert!(out.contains("\"NO\""));
}

#[test]
fn invalid_norm_is_reported_on_stderr() {
    let job = r#"{"norm":{"type":"lp","p":70},"points":[[0,0]]}"#;
    let (code, _, err) = run_stdin(&["--command", "chebyshev"], job);
    assert_eq!(code, 2);
    assert!(err.contains("p outside admitted strictly convex range"));
}

#[test]
fn malformed_job_names_the_field() {
    let (code, _, err) = run_stdin(&["hull"], r#"{"norm":{"type":"lp","p":2},"points":[[0,0]],"lambda":"big"}"#);
    assert_eq!(code, 2);
    assert!(err.contains("lambda") || err.contains("line"), "{err}");
    let (code, _, err) = run_stdin(&["hull"], r#"{"points":[[0,0]]}"#);
    assert_eq!(code, 2);
    assert!(err.contains("norm"), "{err}");
}

#[test]
fn svg_and_output_files() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("lens.svg");
    let res = dir.path().join("lens.json");
    let job = r#"{"norm":{"type":"lp","p":2},"points":[[0,0],[1,0]],"lambda":1}"#;
    let (code, out, _) = run_stdin(
        &["intersection", "--svg", svg.to_str().unwrap(), "--output", res.to_str().unwrap()],
        job,
    );
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("<path ").count(), 2);
    assert_eq!(text.matches("<circle ").count(), 2);
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&res).unwrap()).unwrap();
    assert_eq!(doc["chains"][0]["arcs"].as_array().unwrap().len(), 2);
    let v = &doc["chains"][0]["vertices"];
    let ys: Vec<f64> = v.as_array().unwrap().iter().map(|p| p[1].as_f64().unwrap()).collect();
    assert!(ys.iter().any(|&y| (y - 0.866025403784).abs() < 1e-12));

    let (code, _, _) = run_stdin(&["intersection", "--svg", "/nonexistent-dir/x.svg"], job);
    assert_eq!(code, 2);
}

#[test]
fn exhaustive_and_tolerance_flags() {
    let job = r#"{"norm":{"type":"lp","p":3},"points":[[0,0],[0,2],[10,0],[10,2]],"r1":1.5,"r2":1.2}"#;
    let (code, out, _) = run_stdin(&["two-center", "--exhaustive", "--tolerance", "1e-10"], job);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["tolerance"], serde_json::json!(1e-10));
    assert!(doc["witnesses"].as_array().unwrap().len() > 1);
    let (code, _, _) = run_stdin(&["two-center", "--tolerance", "5"], job);
    assert_eq!(code, 2);
}

#[test]
fn validate_norm_command() {
    let job = r#"{"norm":{"type":"linear-image","matrix":[[2,0],[0,1]],"base":{"type":"lp","p":4}}}"#;
    let (code, out, _) = run_stdin(&["validate-norm"], job);
    assert_eq!(code, 0);
    assert!(out.contains("\"strictly_convex\": true"));
}
