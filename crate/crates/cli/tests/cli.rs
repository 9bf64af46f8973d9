use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_toricgk")
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn toricgk(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn cp1_equivalence_writes_constant_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.csv");
    let res = toricgk(&["equivalence", path(&config("cp1.json")), "-o", path(&out)]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["mu_1", "kappa_boulanger", "kappa_goto", "kappa_from_ricci", "abs_diff"]
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 101);
    for r in &rows {
        for col in 1..=3 {
            let k: f64 = r[col].parse().unwrap();
            assert!((k - 4.0).abs() < 1e-9);
        }
    }
}

#[test]
fn inadmissible_parameters_exit_with_invalid_input() {
    let res = toricgk(&["validate", path(&config("inadmissible.json"))]);
    assert_eq!(res.status.code(), Some(2));
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("-1.25e0"), "{err}");
}

#[test]
fn clifford_selftest_passes() {
    let res = toricgk(&["clifford-selftest"]);
    assert_eq!(res.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(report["passed"], true);
    assert!(report["checks"].as_array().unwrap().len() > 40);
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, cfg) in [
        ("equivalence", "square.json"),
        ("connection-suite", "square.json"),
        ("csc-optimize", "csc_cp1.json"),
    ] {
        let a = dir.path().join("a");
        let b = dir.path().join("b");
        for o in [&a, &b] {
            let res = toricgk(&[cmd, path(&config(cfg)), "-o", path(o)]);
            assert_eq!(
                res.status.code(),
                Some(0),
                "{cmd}: {}",
                String::from_utf8_lossy(&res.stderr)
            );
        }
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), "{cmd}");
    }
}

#[test]
fn malformed_json_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"polytope\": {\"dim\": 1,,}\n}\n").unwrap();
    let res = toricgk(&["frame", path(&bad)]);
    assert_eq!(res.status.code(), Some(2));
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("line 2, column"), "{err}");
}

#[test]
fn tolerance_failure_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tight.json");
    let text = std::fs::read_to_string(config("csc_cp1.json")).unwrap();
    std::fs::write(&cfg, text.replace("\"budget\": 200", "\"budget\": 2")).unwrap();
    let res = toricgk(&["csc-optimize", path(&cfg)]);
    assert_eq!(res.status.code(), Some(1));
}

#[test]
fn missing_config_is_invalid_input() {
    assert_eq!(toricgk(&["frame"]).status.code(), Some(2));
    assert_eq!(toricgk(&["frame", "/nonexistent/config.json"]).status.code(), Some(2));
}
