use std::io::{BufRead, BufReader};
use std::process::{Command, Output, Stdio};

use cpscope::trace::TraceFile;

fn cpscope() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cpscope"));
    c.env_remove("CPSCOPE_PORT");
    c
}

fn run(args: &[&str]) -> Output {
    cpscope().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn lists_the_built_in_models() {
    let o = run(&["list-models"]);
    assert!(o.status.success());
    let names: Vec<String> = stdout(&o).lines().map(|l| l.split_whitespace().next().unwrap().to_string()).collect();
    for m in ["golomb4", "golomb5", "golomb6", "ft06", "pheasants", "warehouse"] {
        assert!(names.iter().any(|n| n == m), "{m} missing from {names:?}");
    }
}

#[test]
fn headless_run_reports_and_writes_a_trace() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("g5.ndjson");
    let o = run(&["run", "golomb5", "--no-ui", "--trace", t.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.contains("best objective: 11 (proven optimal)"), "{out}");
    let trace = TraceFile::load(&t).unwrap();
    assert_eq!(trace.header.model, "golomb5");
    assert_eq!(trace.summary().unwrap().run.best_objective, Some(11));
}

#[test]
fn compare_of_a_trace_with_itself_has_no_deltas() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("g4.ndjson");
    assert!(run(&["run", "golomb4", "--no-ui", "--trace", t.to_str().unwrap()]).status.success());
    let p = t.to_str().unwrap();
    let o = run(&["compare", p, p, "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["a"], v["b"]);
    assert_eq!(v["structure"]["same_paths"], true);
    for d in v["structure"]["matched"].as_array().unwrap() {
        assert_eq!(d["delta"], 0);
    }
    assert!(stdout(&run(&["compare", p, p])).contains("paths: identical"));
}

#[test]
fn compare_warns_across_models() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.ndjson");
    let b = dir.path().join("b.ndjson");
    assert!(run(&["run", "golomb4", "--no-ui", "--trace", a.to_str().unwrap()]).status.success());
    assert!(run(&["run", "pheasants", "--no-ui", "--trace", b.to_str().unwrap()]).status.success());
    let o = run(&["compare", a.to_str().unwrap(), b.to_str().unwrap(), "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(!v["warnings"].as_array().unwrap().is_empty());
    assert!(v["structure"].is_null());
}

#[test]
fn usage_errors_exit_with_2() {
    for args in [
        &["run", "nosuch", "--no-ui"][..],
        &["run", "golomb9", "--no-ui"],
        &["run", "golomb4", "--no-ui", "--port", "7654"],
        &["run", "golomb4", "--no-ui", "--breakpoint", "[0]"],
        &["run", "golomb4", "--breakpoint", "[0]"],
        &["run", "golomb4", "--no-ui", "--strategy", "dfs", "--max-discrepancies", "2"],
        &["run", "golomb4", "--no-ui", "--filter-level", "psychic"],
        &["frobnicate"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn no_ui_overrides_the_environment_port() {
    let o = cpscope().env("CPSCOPE_PORT", "1").args(["run", "golomb4", "--no-ui"]).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn discrepancy_limit_implies_lds() {
    let o = run(&["run", "golomb5", "--no-ui", "--max-discrepancies", "1"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("(lds("), "{}", stdout(&o));
}

#[test]
fn missing_gui_is_a_runtime_failure() {
    // Grab a free port, then let it go.
    let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let o = run(&["run", "golomb4", "--port", &port.to_string()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn serve_and_attached_run_agree_with_headless() {
    let dir = tempfile::tempdir().unwrap();
    let mirror = dir.path().join("mirror.ndjson");
    let solver_side = dir.path().join("solver.ndjson");
    let headless = dir.path().join("headless.ndjson");

    let mut serve = cpscope()
        .args(["serve", "--port", "0", "--breakpoint", "[0,1]", "--trace", mirror.to_str().unwrap()])
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut lines = BufReader::new(serve.stdout.take().unwrap()).lines();
    let first = lines.next().unwrap().unwrap();
    let port = first.rsplit(':').next().unwrap().to_string();
    assert!(first.starts_with("listening on"), "{first}");

    let o = run(&["run", "golomb5", "--port", &port, "--trace", solver_side.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rest: Vec<String> = lines.map(Result::unwrap).collect();
    assert!(serve.wait().unwrap().success());
    assert!(rest.iter().any(|l| l == "PausedAtNode([0,1])"), "{rest:?}");

    assert!(run(&["run", "golomb5", "--no-ui", "--trace", headless.to_str().unwrap()]).status.success());
    let h = std::fs::read_to_string(&headless).unwrap();
    assert_eq!(std::fs::read_to_string(&solver_side).unwrap(), h);
    assert_eq!(std::fs::read_to_string(&mirror).unwrap(), h);
}
