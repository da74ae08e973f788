use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn wavecert(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wavecert")).current_dir(dir).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

#[test]
fn basis_element_has_expected_radial_exponent() {
    let dir = tempfile::tempdir().unwrap();
    let o = wavecert(dir.path(), &["dspace", "basis", "--xi", "1", "--l", "3", "--j", "0", "--m", "0"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    let term = &v["terms"][0];
    assert_eq!(term["l"], 3);
    assert_eq!(term["profile"]["kind"], "monomial");
    let exps: Vec<i64> = term["profile"]["terms"].as_array().unwrap().iter().map(|t| t["a"].as_i64().unwrap()).collect();
    assert_eq!(exps, vec![-4]);
}

#[test]
fn basis_element_is_certified_member() {
    let dir = tempfile::tempdir().unwrap();
    let o = wavecert(
        dir.path(),
        &["dspace", "basis", "--xi", "1.5", "--l", "2", "--j", "0", "--m", "-1", "--out", "y.json"],
    );
    assert_eq!(code(&o), 0);
    let o = wavecert(dir.path(), &["dspace", "check", "--input", "y.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let v = stdout_json(&o);
    assert_eq!(v["member"], true);
    assert_eq!(v["radon_constant_exact"], true);
}

#[test]
fn non_member_fails_check_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let y = r#"{"xi": 1.0, "terms": [{"l": 2, "m": 0, "profile": {"kind": "monomial", "terms": [{"c": 1.0, "a": -4}]}}]}"#;
    fs::write(dir.path().join("y.json"), y).unwrap();
    let o = wavecert(dir.path(), &["dspace", "check", "--input", "y.json"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout_json(&o)["member"], false);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&wavecert(dir.path(), &["--bogus"])), 2);
    assert_eq!(code(&wavecert(dir.path(), &["dspace", "basis", "--xi", "1"])), 2);
    assert_eq!(code(&wavecert(dir.path(), &["dspace", "check", "--input", "missing.json"])), 2);
    assert_eq!(code(&wavecert(dir.path(), &["counterexample", "run", "--N", "3", "--schedule", "abc"])), 2);
    assert_eq!(
        code(&wavecert(dir.path(), &["wavesim", "eval", "--input", "y.json", "--x", "1,2", "--t", "1"])),
        2
    );
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.cfg"), "tol_jump = -1\n").unwrap();
    fs::write(dir.path().join("unknown.cfg"), "colour = red\n").unwrap();
    for cfg in ["bad.cfg", "unknown.cfg", "absent.cfg"] {
        let o = wavecert(dir.path(), &["--config", cfg, "control", "random", "--L", "2", "--xi", "1"]);
        assert_eq!(code(&o), 2, "{cfg}");
    }
    let o = wavecert(dir.path(), &["--band-limit", "2", "dspace", "basis", "--xi", "1", "--l", "3", "--j", "0", "--m", "0"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn same_seed_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let run = |seed: &str, out: &str| {
        let o = wavecert(dir.path(), &["--seed", seed, "control", "random", "--L", "3", "--xi", "1.2", "--out", out]);
        assert_eq!(code(&o), 0);
        fs::read(dir.path().join(out)).unwrap()
    };
    let a = run("11", "a.json");
    let b = run("11", "b.json");
    let c = run("12", "c.json");
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn control_round_trip_checks_pass() {
    let dir = tempfile::tempdir().unwrap();
    let o = wavecert(dir.path(), &["control", "random", "--L", "2", "--xi", "1", "--out", "f.json"]);
    assert_eq!(code(&o), 0);
    let o = wavecert(dir.path(), &["control", "unitarity", "--input", "f.json"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert!(v["relative_gap"].as_f64().unwrap() <= v["tolerance"].as_f64().unwrap());

    let o = wavecert(dir.path(), &["dspace", "basis", "--xi", "1", "--l", "1", "--j", "0", "--m", "1", "--out", "y.json"]);
    assert_eq!(code(&o), 0);
    let o = wavecert(dir.path(), &["control", "adjoint", "--control", "f.json", "--state", "y.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn observe_writes_csv_trace() {
    let dir = tempfile::tempdir().unwrap();
    let o = wavecert(dir.path(), &["dspace", "basis", "--xi", "1", "--l", "2", "--j", "0", "--m", "0", "--out", "y.json"]);
    assert_eq!(code(&o), 0);
    let o = wavecert(dir.path(), &["observe", "--input", "y.json", "--out", "o.csv"]);
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(dir.path().join("o.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().contains("tau"));
    assert!(lines.count() > 400);
}

#[test]
fn jump_extraction_emits_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = wavecert(dir.path(), &["wavesim", "jump", "--xi0", "2", "--t=-1,-0.5", "--l", "1", "--m", "0"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().count() >= 3);
}

#[test]
fn verify_all_reports_every_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let o = wavecert(dir.path(), &["verify-all", "--preset", "paper", "--out-dir", "va"]);
    let c = code(&o);
    assert!(c == 0 || c == 1);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().filter(|l| l.starts_with("PASS ") || l.starts_with("FAIL ")).collect();
    assert_eq!(lines.len(), 9);
    assert_eq!(c == 0, lines.iter().all(|l| l.starts_with("PASS")));

    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("va/report.json")).unwrap()).unwrap();
    let entries = report.as_array().or_else(|| report["criteria"].as_array()).expect("criteria list");
    assert_eq!(entries.len(), 9);
    for e in entries {
        assert!(e["tolerance"].is_number(), "{e}");
        assert!(e["pass"].is_boolean());
    }
    assert!(dir.path().join("va/jump_vr.csv").exists());
    assert!(dir.path().join("va/growth_inv_k.csv").exists());
}

#[test]
fn counterexample_run_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = wavecert(dir.path(), &["counterexample", "run", "--N", "3", "--k-max", "2", "--out", "ce/h.json"]);
    let c = code(&o);
    assert!(c == 0 || c == 1);
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("ce/h.json")).unwrap()).unwrap();
    assert_eq!(v["N"], 3);
    assert_eq!(v["membership"]["passed"], true);
    assert!(v["value_at_2"]["beltrami_norm_sq"].as_f64().unwrap() > 0.0);
    assert_eq!(v["pass"] == true, c == 0);
    let norms = fs::read_to_string(dir.path().join("ce/norms_at_two.csv")).unwrap();
    assert_eq!(norms.lines().count(), 4);
    assert!(dir.path().join("ce/growth.csv").exists());
}

#[test]
fn verify_all_artifacts_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["r1", "r2"] {
        wavecert(dir.path(), &["verify-all", "--seed", "5", "--out-dir", out]);
    }
    for name in ["report.json", "jump_vr.csv", "growth_inv_k.csv"] {
        let a = fs::read(dir.path().join("r1").join(name)).unwrap();
        let b = fs::read(dir.path().join("r2").join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
}
