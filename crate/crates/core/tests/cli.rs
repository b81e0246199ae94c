use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ppt-bounds")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn bounds_reports_irreversibility() {
    let o = run(&["bounds", "rho_v"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("E_N                0.771553303"), "{text}");
    assert!(text.contains("IRREVERSIBLE"));

    let o = run(&["bounds", "maxent:2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("NOT ESTABLISHED"));
}

#[test]
fn bounds_json_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    assert_eq!(run(&["bounds", "rho_alpha:0.45", "--json", path_str(&a)]).status.code(), Some(0));
    assert_eq!(run(&["--sequential", "bounds", "rho_alpha:0.45", "--json", path_str(&b)]).status.code(), Some(0));
    let (ja, jb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ja, jb);
    let v: serde_json::Value = serde_json::from_slice(&ja).unwrap();
    assert_eq!(v["irreversible"], true);
    assert_eq!(v["e_n"].as_f64().unwrap(), 0.768554763);
}

#[test]
fn bad_input_exits_2() {
    for args in [
        &["bounds", "bogus"][..],
        &["bounds", "rho_alpha:1.5"],
        &["scan-alpha", "--from", "0.6", "--to", "0.5"],
        &["scan-alpha", "--steps", "1"],
        &["additivity", "rho_v", "rho_v", "--max-dim", "36"],
        &["state", "check", "/nonexistent/file.json"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn scan_is_byte_identical_across_runs_and_schedules() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    assert_eq!(run(&["scan-alpha", "--out", path_str(&a)]).status.code(), Some(0));
    assert_eq!(run(&["--sequential", "scan-alpha", "--out", path_str(&b)]).status.code(), Some(0));
    let csv = std::fs::read_to_string(&a).unwrap();
    assert_eq!(csv, std::fs::read_to_string(&b).unwrap());
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "alpha,e_n,e_w,e_eta,eta_lower,gap,irreversible");
    assert_eq!(lines.len(), 18);
    assert_eq!(lines[1], "0.42,0.763834024,0.763834032,0.785875194,0.785875195,0.0220411618,true");
    assert!(lines[1..].iter().all(|l| l.ends_with(",true")));
}

#[test]
fn verify_exit_codes() {
    let o = run(&["verify"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("ALL PASS"));

    let o = run(&["verify", "--inject-corrupt"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("FAIL corrupted"));

    let o = run(&["verify", "--tolerance", "1e-16"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).lines().any(|l| l.starts_with("FAIL")));
}

#[test]
fn verify_writes_json_details() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("checks.json");
    assert_eq!(run(&["verify", "--out", path_str(&out)]).status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert!(v.as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn state_files_round_trip_and_feed_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("rho_v.json");
    assert_eq!(run(&["state", "emit", "rho_v", "--out", path_str(&file)]).status.code(), Some(0));
    let o = run(&["state", "check", path_str(&file)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("ok 3x3 rank 2"), "{}", stdout(&o));

    let o = run(&["bounds", path_str(&file)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("IRREVERSIBLE"));
}

#[test]
fn state_check_rejects_wrong_trace() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("scaled.json");
    let o = run(&["state", "emit", "maxent:2"]);
    let mut v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for row in v["matrix"].as_array_mut().unwrap() {
        for e in row.as_array_mut().unwrap() {
            let re = e["re"].as_f64().unwrap();
            e["re"] = serde_json::json!(re * 0.9);
        }
    }
    std::fs::write(&file, v.to_string()).unwrap();
    let o = run(&["state", "check", path_str(&file)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("trace"));
}

#[test]
fn additivity_within_guard() {
    let o = run(&["additivity", "rho_v", "maxent:2", "--max-dim", "36"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("defect"), "{}", stdout(&o));
}
