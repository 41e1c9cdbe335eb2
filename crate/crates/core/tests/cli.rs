use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const L2_SUM_INF_R: &str = r#"{"kind":"absolute_sum",
  "outer":{"kind":"lp","p":"inf","dim":2},
  "left":{"kind":"lp","p":2,"dim":2},
  "right":{"kind":"lp","p":1,"dim":1}}"#;

fn nidx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nidx")).args(args).output().expect("binary runs")
}

fn nidx_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_nidx"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    assert_eq!(v["schema"], "1");
    v
}

fn write_temp(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn space_reports_dual_and_flags() {
    let out = nidx(&["space", "--space", L2_SUM_INF_R]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["command"], "space");
    assert_eq!(v["result"]["dim"], 3);
    assert_eq!(v["result"]["euclidean"], false);
}

#[test]
fn radius_from_files_reports_value_and_witness() {
    let dir = tempfile::tempdir().unwrap();
    let space = write_temp(&dir, "l2_4.json", r#"{"kind":"lp","p":2,"dim":4}"#);
    let matrix = write_temp(&dir, "t.json", "[[1,2,0,0],[0,1,0,0],[0,0,-3,1],[0,0,1,0]]");
    let out = nidx(&["radius", "--space", &space, "--matrix", &matrix, "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let value = v["result"]["value"].as_f64().unwrap();
    // symmetric part has eigenvalue (-3 - sqrt 13) / 2 of largest modulus
    assert!((value - (3.0 + 13f64.sqrt()) / 2.0).abs() < 2e-2, "{value}");
    assert!(v["result"]["witness"].is_object());
    assert_eq!(v["config"]["seed"], 1);
}

#[test]
fn csv_matrix_and_csv_output() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = write_temp(&dir, "t.csv", "# rows\n2, -1\n0.5, 1.5\n");
    let out = nidx(&["opnorm", "--space", r#"{"kind":"lp","p":1,"dim":2}"#, "--matrix", &matrix, "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let mut rd = csv::Reader::from_reader(&out.stdout[..]);
    assert_eq!(rd.headers().unwrap().get(0), Some("schema"));
    let row = rd.records().next().unwrap().unwrap();
    assert_eq!(row.get(0), Some("1"));
    assert_eq!(row.get(1), Some("opnorm"));
    assert_eq!(row.get(2).unwrap().parse::<f64>().unwrap(), 2.5);
}

#[test]
fn lie_of_plane_plus_line_is_one_rotation() {
    let dir = tempfile::tempdir().unwrap();
    let space = write_temp(&dir, "l2sum_inf_r.json", L2_SUM_INF_R);
    let out = nidx(&["lie", "--space", &space]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["basis"]["dimension"], 1);
    let e = &v["result"]["basis"]["elements"][0];
    let a = e[0][1].as_f64().unwrap();
    assert!((a.abs() - 0.5f64.sqrt()).abs() < 1e-6);
    assert!((e[1][0].as_f64().unwrap() + a).abs() < 1e-9);
}

#[test]
fn space_from_stdin() {
    let out = nidx_stdin(&["lie", "--space", "-"], L2_SUM_INF_R);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["basis"]["dimension"], 1);
}

#[test]
fn malformed_space_exits_2_with_position() {
    let out = nidx(&["space", "--space", "{\"kind\": \"lp\",\n \"p\": }"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn invalid_exponent_exits_2() {
    let out = nidx(&["space", "--space", r#"{"kind":"lp","p":0.5,"dim":2}"#]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(nidx(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(nidx(&["--help"]).status.code(), Some(0));
}

#[test]
fn bad_thread_count_exits_2() {
    let out = Command::new(env!("CARGO_BIN_EXE_nidx"))
        .args(["space", "--space", L2_SUM_INF_R])
        .env("NIDX_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn construct_t1_feeds_quotient() {
    let t1 = nidx(&["construct", "t1", "--space", L2_SUM_INF_R]);
    assert_eq!(t1.status.code(), Some(0));
    let op = json(&t1)["result"].to_string();
    let out = nidx(&["quotient", "--matrix", &op, "--budget", "4000", "--seed", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let q = json(&out)["result"]["estimate"]["value"].as_f64().unwrap();
    assert!(q >= 3f64.sqrt() - 3e-2, "{q}");
}

#[test]
fn index2_of_euclidean_plane_is_one() {
    let out = nidx(&["index2", "--space", r#"{"kind":"lp","p":2,"dim":2}"#]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["estimate"]["value"], 1.0);
}

#[test]
fn index_of_l1_plane() {
    let out = nidx(&["index", "--space", r#"{"kind":"lp","p":1,"dim":2}"#, "--restarts", "2", "--budget", "1000"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["result"]["estimate"]["value"].as_f64().unwrap() >= 0.97);
    assert_eq!(v["result"]["witness_check"]["ok"], true);
}

#[test]
fn shift_check_passes_on_l3() {
    let out = nidx(&["shift-check", "--space", r#"{"kind":"lp","p":3,"dim":2}"#]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["pass"], true);
}

#[test]
fn paper_suite_hilbert_filter_passes_and_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("reports");
    let out = nidx(&[
        "paper-suite",
        "--filter",
        "hilbert",
        "--scale",
        "0.5",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let claims = v["result"].as_array().unwrap();
    assert_eq!(claims.len(), 2);
    assert!(claims.iter().all(|c| c["status"] == "pass"));
    let written: Value = serde_json::from_slice(&std::fs::read(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(written, v);
    let csv_text = std::fs::read_to_string(out_dir.join("report.csv")).unwrap();
    assert!(csv_text.starts_with("claim_id,"));
}

#[test]
fn unknown_claim_filter_exits_2() {
    let out = nidx(&["suite", "--filter", "nonexistent"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown claim id"));
}
