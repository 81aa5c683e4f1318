//! The `spec` and `closure` binaries: exit codes, artifacts and
//! reproducibility.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const SPEC: &str = env!("CARGO_BIN_EXE_spec");
const CLOSURE: &str = env!("CARGO_BIN_EXE_closure");

fn suite() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/free_suite.json")
}

fn run(bin: &str, args: &[&str]) -> Output {
    Command::new(bin).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn files(dir: &Path) -> Vec<String> {
    if !dir.exists() {
        return Vec::new();
    }
    let mut v: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    v.sort();
    v
}

#[test]
fn free_suite_passes_and_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for out in [&a, &b] {
        let o = run(SPEC, &["run", "--config", suite().to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let names = files(&a);
    assert_eq!(names.len(), 7, "{names:?}");
    for n in &names {
        assert_eq!(fs::read(a.join(n)).unwrap(), fs::read(b.join(n)).unwrap(), "{n} differs between runs");
    }
    let summary: Value = serde_json::from_str(&fs::read_to_string(a.join("summary.json")).unwrap()).unwrap();
    let reports = summary["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 3);
    assert!(reports.iter().all(|r| r["status"] == "PASS"));
    for n in ["free_jacobi", "free_cmv", "free_schrodinger"] {
        let r: Value = serde_json::from_str(&fs::read_to_string(a.join(format!("{n}.json"))).unwrap()).unwrap();
        assert_eq!(r["schema"], "v1");
        assert_eq!(r["theorem_inclusion"]["contained_in_ac"], true);
        let csv = fs::read_to_string(a.join(format!("{n}.csv"))).unwrap();
        assert!(!csv.contains('\r'));
        let header = csv.lines().next().unwrap();
        let cols = header.split(',').count();
        assert!(csv.lines().all(|l| l.split(',').count() == cols), "{n}: ragged CSV");
    }
}

#[test]
fn malformed_config_exits_2_without_files() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "bad.json", "{\"operators\": [");
    let out = tmp.path().join("out");
    let o = run(SPEC, &["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(files(&out).is_empty());

    // A schema violation in the last operator still writes nothing.
    let cfg = write(
        tmp.path(),
        "late.json",
        r#"{"operators":[
            {"name":"ok","descriptor":{"type":"jacobi","period":1,"a":[1],"b":[0]}},
            {"name":"bad","descriptor":{"type":"jacobi","period":2,"a":[1],"b":[0]}}]}"#,
    );
    let o = run(SPEC, &["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(files(&out).is_empty());
}

#[test]
fn unknown_type_exits_3_listing_types() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", r#"{"operators":[{"name":"d","descriptor":{"type":"dirac"}}]}"#);
    let out = tmp.path().join("out");
    let o = run(SPEC, &["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    let err = String::from_utf8_lossy(&o.stderr);
    for t in ["jacobi", "cmv", "schrodinger"] {
        assert!(err.contains(t), "{err}");
    }
    assert!(files(&out).is_empty());
}

#[test]
fn missing_config_exits_4() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(SPEC, &["run", "--config", "/nonexistent/c.json", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(code(&o), 4);
}

#[test]
fn failed_report_names_inequality_and_exits_1() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "c.json",
        r#"{"tolerances":{"identity_tol":1e-300},
            "operators":[{"name":"f","descriptor":{"type":"jacobi","period":1,"a":[1],"b":[0]},"grid":"-3:3:301"}]}"#,
    );
    let out = tmp.path().join("out");
    let o = run(SPEC, &["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let r: Value = serde_json::from_str(&fs::read_to_string(out.join("f.json")).unwrap()).unwrap();
    assert_eq!(r["status"], "FAILED");
    assert_eq!(r["tolerances"]["identity_tol"], 1e-300);
    let failures = r["failures"].as_array().unwrap();
    assert!(!failures.is_empty());
    for f in failures {
        assert!(f["inequality"].as_str().unwrap().contains("<=") || f["inequality"].as_str().unwrap().contains(">="));
        assert!(f["margin"].as_f64().unwrap() < 0.0);
    }
}

#[test]
fn single_operator_commands() {
    let tmp = tempfile::tempdir().unwrap();
    let desc = write(tmp.path(), "j.json", r#"{"type":"jacobi","period":1,"a":[1],"b":[0]}"#);
    let o = run(SPEC, &["jacobi", "--desc", desc.to_str().unwrap(), "--grid", "-3:3:61", "--emit", "xi"]);
    assert_eq!(code(&o), 0);
    let csv = String::from_utf8(o.stdout).unwrap();
    assert!(csv.starts_with("lambda,xi,verdict\n"));
    assert_eq!(csv.lines().count(), 62);
    let row = csv.lines().find(|l| l.starts_with("0,")).unwrap();
    assert!(row.ends_with(",ac"), "{row}");

    let o = run(SPEC, &["jacobi", "--desc", desc.to_str().unwrap(), "--grid", "-3:3:301", "--emit", "spectrum"]);
    let ac: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(ac["set"]["carrier"], "line");

    let e = write(tmp.path(), "e.json", r#"{"carrier":"line","intervals":[[3,4,"cc"]]}"#);
    let o = run(SPEC, &["jacobi", "--desc", desc.to_str().unwrap(), "--grid", "-5:5:501", "--e", e.to_str().unwrap()]);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["reflectionless"]["verdict"], false);
    assert_eq!(r["theorem_inclusion"]["hypotheses_met"], false);
    assert!(r["theorem_inclusion"]["status"].as_str().unwrap().starts_with("skipped"));

    // Descriptor type must match the subcommand.
    let o = run(SPEC, &["cmv", "--desc", desc.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn closure_commands() {
    let o = run(CLOSURE, &["sets", "--demo"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("[0, 1]∪{2} → [0, 1]"));
    assert!(text.contains("essential closure ∅"));
    assert!(text.contains("≤ 2/3") && text.contains("≥ 1/3"));

    let tmp = tempfile::tempdir().unwrap();
    let s = write(tmp.path(), "s.json", r#"{"carrier":"line","intervals":[[0,1,"oo"],[1,2,"oc"]],"points":[5]}"#);
    let o = run(CLOSURE, &["essential", "--input", s.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["display"], "[0, 2]");

    let bad = write(tmp.path(), "bad.json", r#"{"carrier":"line","intervals":[[2,1,"cc"]]}"#);
    assert_eq!(code(&run(CLOSURE, &["essential", "--input", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&run(CLOSURE, &["essential", "--input", "/nonexistent.json"])), 4);
}
