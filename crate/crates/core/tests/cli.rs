use std::process::Command;

use mhdec::partition::partition_from_json;

fn mhdec(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_mhdec")).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    mhdec(args).status.code().expect("exit code")
}

fn strip_timestamp(s: &str) -> String {
    let re_start = "\"timestamp\":";
    let mut out = String::new();
    let mut rest = s;
    while let Some(i) = rest.find(re_start) {
        out.push_str(&rest[..i]);
        let tail = &rest[i + re_start.len()..];
        let end = tail.find(|c: char| !c.is_ascii_digit()).unwrap_or(tail.len());
        rest = &tail[end..];
    }
    out.push_str(rest);
    out
}

#[test]
fn analyze_model_a2() {
    let out = mhdec(&["analyze", "x^4+6*x^2*y+6*y^2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("(q, r, s) = (4, 1, 2)"), "{text}");
    assert!(text.contains("hessian det K: 144*y"), "{text}");
    assert!(text.contains("components:    1 "), "{text}");
    assert!(text.contains("A2        k = 1  axis y = 0"), "{text}");
}

#[test]
fn analyze_circle_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.json");
    let out = mhdec(&["analyze", "-p", "x^2+y^2", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("components:    none"));
    assert!(text.contains("convexity:     convex"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["weights"], serde_json::json!([2, 1, 1]));
    assert_eq!(v["convexity"], "convex");
    assert_eq!(v["manifest"]["command"], "analyze");
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["analyze", "x^2+x*y+y^3"]), 2);
    assert_eq!(code(&["analyze", "x^^2"]), 1);
    assert_eq!(code(&["partition", "x^2+y^2", "-d", "1.5"]), 1);
    assert_eq!(code(&["partition", "x^2+y^2"]), 1);
    assert_eq!(code(&["frobnicate"]), 1);
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&["partition", "x^2+x*y+y^3", "-d", "2^-4"]), 2);
    assert_eq!(code(&["verify", "/nonexistent/partition.json"]), 1);
}

#[test]
fn partition_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("p.json");
    let svg = dir.path().join("p.svg");
    let args = ["partition", "-p", "x^2*y^2+y^3", "-d", "2^-8", "--out", json.to_str().unwrap(), "--svg", svg.to_str().unwrap()];
    assert_eq!(code(&args), 0);
    let p = partition_from_json(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(p.manifest.as_ref().unwrap()["command"], "partition");
    let s = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(s.matches("<path").count(), p.pieces.len());
    assert!(s.contains("<metadata>"));

    let out = mhdec(&["verify", json.to_str().unwrap(), "--samples", "200000"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8(out.stdout).unwrap().contains("PASS"));

    let out = mhdec(&["verify", json.to_str().unwrap(), "--samples", "1000", "--c-flat", "0.5"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8(out.stderr).unwrap().contains("piece "));
}

#[test]
fn partition_is_deterministic() {
    let run = || {
        let out = mhdec(&["partition", "-p", "x^4+6*x^2*y+6*y^2", "-d", "2^-8", "--seed", "7"]);
        assert_eq!(out.status.code(), Some(0));
        strip_timestamp(&String::from_utf8(out.stdout).unwrap())
    };
    assert_eq!(run(), run());
}

#[test]
fn estimate_csv_and_budget() {
    let out = mhdec(&["estimate", "-p", "x^2+y^2", "--delta-list", "2^-4,2^-5", "--trials", "2", "--grid", "32", "--box", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# {"));
    assert_eq!(lines[1], "delta,pieces,D4_mean,D4_max,D2_mean,D2_max,grid_N,box_T,trials,seed");
    assert_eq!(lines.len(), 4);
    assert!(lines[2].starts_with("0.0625,"));

    let out = Command::new(env!("CARGO_BIN_EXE_mhdec"))
        .args(["estimate", "-p", "x^2+y^2", "--delta-list", "2^-4"])
        .env("MHDEC_BUDGET", "1000")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(5));
}
