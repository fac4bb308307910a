use std::path::Path;
use std::process::{Command, Output};

use fekete_sphere::geometry::read_points;
use serde_json::Value;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fekete-sphere"))
        .args(args)
        .env("FEKETE_SPHERE_THREADS", "2")
        .output()
        .expect("spawn CLI")
}

fn code(args: &[&str]) -> i32 {
    cli(args).status.code().unwrap()
}

fn report(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&["generate"]), 64, "missing --L");
    assert_eq!(code(&["generate", "--L", ""]), 64);
    assert_eq!(code(&["generate", "--L", "5..2"]), 64);
    assert_eq!(code(&["generate", "--L", "x"]), 64);
    assert_eq!(code(&["generate", "--L", "2", "--d", "4"]), 64);
    assert_eq!(code(&["frobnicate"]), 64);
    assert_eq!(code(&["mz", "--L", "2", "--eps", "0"]), 64);
}

#[test]
fn help_exits_0() {
    let out = cli(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("generate"));
}

#[test]
fn unreadable_input_exits_66() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.txt");
    assert_eq!(code(&["analyze", "--points", missing.to_str().unwrap()]), 66);
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "not a point file\n").unwrap();
    assert_eq!(code(&["analyze", "--points", bad.to_str().unwrap()]), 66);
}

#[test]
fn missing_source_degree_exits_65() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(code(&["generate", "--L", "2", "--out", d]), 0);
    // Degree 2 with ε = 0.5 needs the degree-3 set, which is absent.
    assert_eq!(code(&["mz", "--L", "2", "--points", d]), 65);
}

#[test]
fn generate_degree_one_is_a_tetrahedron() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(code(&["generate", "--L", "1", "--out", d]), 0);
    let set = read_points(dir.path().join("fekete_d2_L1.txt")).unwrap();
    assert_eq!(set.len(), 4);
    assert_eq!(set.fekete_degree(), Some(1));
    for i in 0..4 {
        for j in i + 1..4 {
            let dot = set.points()[i].dot(&set.points()[j]);
            assert!((dot + 1.0 / 3.0).abs() < 1e-3, "dot {dot}");
        }
    }
    let r = report(&dir.path().join("generate_report.json"));
    assert_eq!(r["schema"], "fs-report/1");
    assert_eq!(r["payload"]["sets"][0]["log"]["certificate_ok"], true);
}

#[test]
fn analyze_single_point_has_zero_lower_bound() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("one.txt");
    std::fs::write(&file, "# sphere d=2 n=1\n0 0 1\n").unwrap();
    let out = cli(&["analyze", "--points", file.to_str().unwrap(), "--L", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    let entry = &r["payload"]["files"][0];
    assert_eq!(entry["separation"], Value::Null);
    let fb = &entry["degrees"][0]["frame_bounds"];
    assert_eq!(fb["lower"].as_f64(), Some(0.0));
    assert_eq!(fb["constant"], Value::Null);
}

#[test]
fn study_reports_decreasing_cap_error() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(code(&["study", "--L", "4,8,12", "--out", d]), 0);
    let r = report(&dir.path().join("study_report.json"));
    assert_eq!(r["payload"]["trends"][0]["result"], "PASS");
    let csv = std::fs::read_to_string(dir.path().join("study.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("degree,num_points,cap_error"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn circle_generate_and_mz() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(code(&["generate", "--d", "1", "--L", "1..6", "--out", d]), 0);
    assert_eq!(code(&["mz", "--d", "1", "--L", "2..4", "--points", d, "--out", d]), 0);
    let r = report(&dir.path().join("mz_report.json"));
    for row in r["payload"]["rows"].as_array().unwrap() {
        let fb = &row["frame_bounds"];
        assert!(fb["lower"].as_f64().unwrap() > 0.0);
    }
}
