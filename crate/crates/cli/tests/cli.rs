use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn kecover() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kecover"))
}

fn run(args: &[&str]) -> Output {
    kecover().args(args).output().expect("binary runs")
}

fn code(output: &Output) -> i32 {
    output.status.code().unwrap_or(-1)
}

fn json(output: &Output) -> Value {
    serde_json::from_slice(&output.stdout).expect("stdout is a JSON report")
}

#[test]
fn documented_family_examples() {
    let out = run(&["family", "hypersurface", "--n", "3", "--d", "3", "--k", "3"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert_eq!(report["command"], "family");
    assert_eq!(report["passed"], true);
    assert_eq!(report["table"]["rows"][0][3], true);

    let out = run(&["family", "double-cover-pn", "--n", "3", "--d", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["table"]["rows"][0][3], false);

    let out = run(&["family", "hypersurface", "--n", "3", "--d", "9", "--k", "1"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not Fano"));
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["family", "--help"])), 0);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["family", "hypersurface", "--n", "3"])), 1);
    assert_eq!(code(&run(&["identities", "--n-grid", "100"])), 1);
    assert_eq!(code(&run(&["identities", "--n-grid", "32"])), 1);
    assert_eq!(code(&run(&["identities", "--window", "4"])), 1);
    assert_eq!(code(&run(&["cover", "--d", "1"])), 1);
    assert_eq!(code(&run(&["singexp", "--m", "1,1,1,1,1", "--lambda", "1"])), 1);
    assert_eq!(code(&run(&["singexp", "--m", "2,0"])), 1);
}

#[test]
fn thread_cap_is_validated() {
    let out = kecover()
        .args(["family", "two-quadrics", "--n", "3"])
        .env("KECOVER_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
    let out = kecover()
        .args(["identities", "--samples", "3", "--n-grid", "1024"])
        .env("KECOVER_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
}

#[test]
fn json_is_byte_identical_for_identical_runs() {
    let args = ["identities", "--samples", "6", "--n-grid", "1024", "--seed", "9"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["identities", "--samples", "6", "--n-grid", "1024", "--seed", "10"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn identities_report_lists_worst_residuals() {
    let report = json(&run(&["identities", "--samples", "10"]));
    assert_eq!(report["passed"], true);
    let rows = report["table"]["rows"].as_array().unwrap();
    assert!(rows.iter().any(|r| r[0] == "j_three_way"));
    for row in rows {
        assert_eq!(row[3], true);
    }
    let convergence = report["summary"]["convergence_second_order"].as_array().unwrap();
    assert_eq!(convergence.len(), 4);
}

#[test]
fn coarse_grid_keeps_second_order_trend() {
    let out = run(&["identities", "--n-grid", "128", "--samples", "10"]);
    let report = json(&out);
    for row in &report["summary"]["convergence_second_order"].as_array().unwrap()[1..] {
        let ratio = row["ratio"].as_f64().unwrap();
        assert!((ratio - 4.0).abs() < 0.5, "{ratio}");
    }
}

#[test]
fn tolerance_overrides_can_fail_a_run() {
    let out = run(&["identities", "--samples", "5", "--tol-j", "1e-15"]);
    assert_eq!(code(&out), 2);
    assert_eq!(json(&out)["passed"], false);
}

#[test]
fn cover_example() {
    let out = run(&["cover", "--d", "2", "--samples", "50"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    let rows = report["table"]["rows"].as_array().unwrap();
    let pullback = rows.iter().find(|r| r[0] == "pullback_f0").unwrap();
    assert!(pullback[1].as_f64().unwrap() < 1e-6);
    assert_eq!(report["summary"]["margins"].as_array().unwrap().len(), 50);
}

#[test]
fn singexp_example_and_csv() {
    let out = run(&["singexp", "--m", "2,2", "--lambda", "0.9,1.1", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].contains("Convergent") && lines[2].contains("Divergent"));
}

#[test]
fn check_reads_the_wire_schema() {
    let system = r#"{"covers":[{"d":2,"beta":"3/1","base_ke":true,"galois":true,"compact_group":true,"smooth_reduced":true}],"disjoint":false,"transverse":false}"#;
    let mut child = kecover()
        .args(["check", "-", "--expect", "true"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(system.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert_eq!(report["summary"]["ke_proven"], true);
    assert_eq!(report["summary"]["criterion"], "single_cover");

    let bad = r#"{"covers":[{"d":2,"beta":"-1/2","base_ke":true,"galois":true,"compact_group":true,"smooth_reduced":true}],"disjoint":false,"transverse":false}"#;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, bad).unwrap();
    assert_eq!(code(&run(&["check", path.to_str().unwrap()])), 1);
}

#[test]
fn pencil_command_passes() {
    let out = run(&["pencil", "--trials", "20"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["summary"]["singular_flagged"], "5/5");
}

#[test]
fn report_aggregates_saved_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("family.json");
    let b = dir.path().join("singexp.json");
    let bad = dir.path().join("broken.json");
    assert_eq!(
        code(&run(&[
            "family",
            "two-quadrics",
            "--n",
            "4",
            "--output",
            a.to_str().unwrap()
        ])),
        0
    );
    assert_eq!(code(&run(&["singexp", "--m", "2", "--output", b.to_str().unwrap()])), 0);
    let out = run(&["report", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# report (PASS)"));
    assert!(text.contains("## family (PASS)") && text.contains("## singexp (PASS)"));

    assert_eq!(
        code(&run(&[
            "identities",
            "--samples",
            "3",
            "--break-kappa",
            "1.1",
            "--output",
            bad.to_str().unwrap()
        ])),
        2
    );
    let out = run(&["report", a.to_str().unwrap(), bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert_eq!(
        code(&run(&["report", dir.path().join("missing.json").to_str().unwrap()])),
        1
    );
}

#[test]
fn hyperelliptic_catalog_reports_two_proofs() {
    let report = json(&run(&["family", "hyperelliptic"]));
    assert_eq!(report["summary"]["ke_proven"], 2);
    assert_eq!(report["passed"], true);
}
