mod common;

use std::path::Path;
use std::process::Command;

fn wbtool(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut argv = vec!["wbtool"];
    argv.extend_from_slice(args);
    let code = willmore::cli::run(argv, &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn cone_verify_writes_one_row_per_level() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = wbtool(&["verify", "cone", "--levels", "3", "--out", path(dir.path())]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("PASS"), "{text}");
    let csv = std::fs::read_to_string(dir.path().join("cone_convergence.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3);
    assert!(csv.starts_with("level,"));
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(json["scenario"], "cone");
    assert_eq!(json["passed"], true);
}

#[test]
fn reports_are_byte_identical_for_the_same_seed() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let (code, _) = wbtool(&["verify", "econe", "--seed", "11", "--out", path(d.path())]);
        assert_eq!(code, 0);
    }
    let ra = std::fs::read(a.path().join("report.json")).unwrap();
    let rb = std::fs::read(b.path().join("report.json")).unwrap();
    assert_eq!(ra, rb);
    assert!(!String::from_utf8(ra).unwrap().contains("runtime"));
}

#[test]
fn timings_add_runtimes() {
    let d = tempfile::tempdir().unwrap();
    let (code, _) = wbtool(&["verify", "econe", "--timings", "--out", path(d.path())]);
    assert_eq!(code, 0);
    let r = std::fs::read_to_string(d.path().join("report.json")).unwrap();
    assert!(r.contains("runtime"));
}

#[test]
fn configuration_errors_exit_2() {
    for args in [
        vec!["verify", "nope"],
        vec!["verify", "cone", "--param", "r0=-1"],
        vec!["verify", "cone", "--param", "bogus=1"],
        vec!["verify", "cone", "--param", "alpha"],
        vec!["verify", "graph", "--param", "u=x^0.5"],
        vec!["verify", "all", "--param", "alpha=1"],
        vec!["verify", "cone", "--levels", "0"],
        vec!["frobnicate"],
    ] {
        assert_eq!(wbtool(&args).0, 2, "{args:?}");
    }
}

#[test]
fn io_errors_exit_2() {
    assert_eq!(wbtool(&["loop-check", "/nonexistent/loop.json"]).0, 2);
    assert_eq!(wbtool(&["solve", "/nonexistent/problem.json"]).0, 2);
    let f = common::fixture("malformed_loop.json");
    assert_eq!(wbtool(&["loop-check", path(&f)]).0, 2);
}

#[test]
fn loop_check_on_fixtures() {
    let (code, text) = wbtool(&["loop-check", path(&common::fixture("cap_loop.json"))]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("extendable: true"));
    assert!(text.contains("[ok  ] isoperimetric equality"), "{text}");

    let d = tempfile::tempdir().unwrap();
    let (code, text) = wbtool(&["loop-check", path(&common::fixture("econe_k1_loop.json")), "--out", path(d.path())]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("extendable: false"));
    let rep: serde_json::Value = serde_json::from_slice(&std::fs::read(d.path().join("loop_report.json")).unwrap()).unwrap();
    assert_eq!(rep["extendable"], false);
}

#[test]
fn solve_two_hole_fixture() {
    let d = tempfile::tempdir().unwrap();
    let (code, text) = wbtool(&["solve", path(&common::fixture("two_hole_problem.json")), "--out", path(d.path())]);
    assert_eq!(code, 0, "{text}");
    let fluxes = std::fs::read_to_string(d.path().join("fluxes.csv")).unwrap();
    assert_eq!(fluxes.lines().count(), 3);
    let sol: serde_json::Value = serde_json::from_slice(&std::fs::read(d.path().join("solution.json")).unwrap()).unwrap();
    let flux: Vec<f64> = serde_json::from_value(sol["flux"].clone()).unwrap();
    let q = std::f64::consts::PI / 8.0;
    assert!((flux[0] - q).abs() < 1e-6 && (flux[1] + q).abs() < 1e-6, "{flux:?}");
    let u = std::fs::read_to_string(d.path().join("u.csv")).unwrap();
    assert!(u.lines().count() > 100);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_wbtool");
    let ok = Command::new(bin).args(["loop-check"]).arg(common::fixture("trivial_frame.json")).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = Command::new(bin).args(["loop-check"]).arg(common::fixture("malformed_loop.json")).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("wbtool:"));
    let help = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
}

#[test]
fn tolerance_scale_reaches_the_binary() {
    // an absurdly tight scale makes the cone fail on discretisation error
    let bin = env!("CARGO_BIN_EXE_wbtool");
    let out = Command::new(bin).args(["verify", "cone", "--levels", "2"]).env("WB_TOL_SCALE", "1e-9").output().unwrap();
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stdout));
    let out = Command::new(bin).args(["verify", "cone", "--levels", "2"]).env("WB_TOL_SCALE", "abc").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
