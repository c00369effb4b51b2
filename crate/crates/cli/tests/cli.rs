use std::process::Command;

fn run(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_drgspin")).args(args).output().unwrap()
}

#[test]
fn conflicting_sources_are_usage_errors() {
    assert_eq!(run(&["analyze", "--cycle", "7", "--hypercube", "3"]).status.code(), Some(2));
    assert_eq!(run(&["analyze"]).status.code(), Some(2));
    assert_eq!(run(&["identities", "--diameter", "2"]).status.code(), Some(2));
    assert_eq!(run(&["scan", "--diameter", "3", "--real-q-step", "0"]).status.code(), Some(2));
}

#[test]
fn small_cycle_is_rejected() {
    let o = run(&["analyze", "--cycle", "5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("DiameterTooSmall"));
}

#[test]
fn impossible_tolerance_fails() {
    assert_eq!(run(&["analyze", "--cycle", "7", "--tolerance", "1e-20"]).status.code(), Some(1));
}

#[test]
fn text_format() {
    let o = run(&["analyze", "--cycle", "7", "--format", "text"]);
    assert!(o.status.success());
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.contains("z.gate") && s.contains("verdict: PASS"));
}

#[test]
fn timing_is_opt_in() {
    let plain = String::from_utf8(run(&["analyze", "--cycle", "7"]).stdout).unwrap();
    assert!(!plain.contains("wall_time"));
    let timed = String::from_utf8(run(&["analyze", "--cycle", "7", "--timing"]).stdout).unwrap();
    assert!(timed.contains("wall_time"));
}

#[test]
fn restricted_scan_excludes_sevenths() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["scan", "--diameter", "3", "--unit-circle-max", "5", "--no-real", "--out-dir", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(dir.path().join("scan_D3.csv")).unwrap();
    assert!(!csv.lines().skip(1).any(|l| l.split(',').nth(7) == Some("7")));
}

#[test]
fn malformed_file_is_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("g.txt");
    std::fs::write(&p, "4 2\n0 1\n1 1\n").unwrap();
    let o = run(&["analyze", "--file", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["error"]["kind"], "ParseError");
}
