use std::path::PathBuf;
use std::process::{Command, Output};

use algebroid_lab::models::zoo;
use algebroid_lab::report::{MorphismReport, Report};

fn models_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn model(name: &str) -> String {
    models_dir().join(format!("{name}.json")).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_algebroid-lab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn model_files_match_the_zoo() {
    for m in zoo() {
        let path = models_dir().join(format!("{}.json", m.name));
        let on_disk = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(on_disk, m.to_json().unwrap(), "{} is stale; rerun the export_zoo example", path.display());
    }
}

#[test]
fn zero_access_on_rigid_body_lists_witnesses() {
    let o = run(&["analyze", &model("rigid_body"), "--test", "zero-access", "--point", "0,0,1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = Report::from_json(&stdout(&o)).unwrap();
    assert_eq!(r.results.len(), 1);
    let t = &r.results[0];
    assert_eq!(t.name, "zero-access");
    assert_eq!(serde_json::to_value(t.verdict).unwrap(), "sufficient");
    assert_eq!(t.ranks.found, t.ranks.required);
    assert!(t.witnesses.iter().any(|w| w.term.contains("[eta1^V, [Gamma")), "{:?}", t.witnesses);
}

#[test]
fn degree_cap_is_flagged() {
    let path = model("tr2_quadratic_drift");
    let caps = |d: &str| {
        let o = run(&["analyze", &path, "--test", "general-access", "--max-degree", d]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let r = Report::from_json(&stdout(&o)).unwrap();
        (r.results[0].caps.reached, r.results[0].verdict)
    };
    let (low, low_verdict) = caps("2");
    let (high, high_verdict) = caps("4");
    assert!(low, "degree 2 should hit the cap");
    assert!(!high, "degree 4 should stabilize");
    assert_ne!(low_verdict, high_verdict);
}

#[test]
fn corrupt_structure_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(model("rigid_body")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["system"]["algebroid"]["structure"][0]["value"] = "2".into();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    let o = run(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("structure equations fail with residual"), "{}", stderr(&o));
}

#[test]
fn malformed_json_exits_2_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"name\": \"x\",\n  \"system\": [\n").unwrap();
    let o = run(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["analyze", "/nonexistent/model.json"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn zero_horizon_writes_header_only() {
    let o = run(&["simulate", &model("rigid_body"), "--horizon", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "t,x1,x2,x3,y1,y2,y3,u1,u2\n");
}

#[test]
fn free_rigid_body_conserves_energy() {
    let o = run(&["simulate", &model("rigid_body"), "--point", "0,0,1", "--velocity", "0.3,1,-0.2", "--horizon", "10"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let rows: Vec<Vec<f64>> = text.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 10_001);
    assert!((rows.last().unwrap()[0] - 10.0).abs() < 1e-9);
    let energy = |r: &[f64]| 0.5 * (r[4] * r[4] + 2.0 * r[5] * r[5] + 3.0 * r[6] * r[6]);
    let e0 = energy(&rows[0]);
    let drift = rows.iter().map(|r| ((energy(r) - e0) / e0).abs()).fold(0.0, f64::max);
    assert!(drift < 1e-6, "drift {drift:e}");
}

#[test]
fn sample_reachable_writes_endpoints_and_ranks() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ends.csv");
    let o = run(&["simulate", &model("tq_flat_2_single"), "--sample-reachable", "200", "--horizon", "1", "--seed", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "base_rank 1 full_rank 2 dropped 0");
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 201);
    assert_eq!(csv.lines().next(), Some("x1,x2,y1,y2"));
}

#[test]
fn reports_round_trip_and_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let args = ["analyze", &model("reduction_pair"), "--out", out.to_str().unwrap()];
    assert_eq!(run(&args).status.code(), Some(0));
    let first = std::fs::read_to_string(&out).unwrap();
    assert_eq!(Report::from_json(&first).unwrap().to_json().unwrap(), first);
    assert_eq!(run(&args).status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), first);
}

#[test]
fn check_morphism_reports_consistent_claims() {
    let o = run(&["check-morphism", &model("reduction_pair")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let r = MorphismReport::from_json(&text).unwrap();
    assert_eq!(r.to_json().unwrap(), text);
    let m = &r.morphisms[0];
    assert!(m.morphism_residual < 1e-10 && m.admissible_residual < 1e-10);
    assert!(m.claims.iter().all(|c| c.consistent));

    let o = run(&["check-morphism", &model("rigid_body")]);
    assert_eq!(o.status.code(), Some(1));
}
