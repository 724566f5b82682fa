use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_d4selmer"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

fn csv_rows(out: &Output) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    r.records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect()
}

#[test]
fn cusp_table_has_eleven_passing_rows() {
    let out = run(&["cusp-table", "--format", "csv"]);
    assert!(out.status.success());
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 11);
    assert_eq!(rows[0][0], "1");
    assert_eq!(rows[1][0], "1 2");
    assert!(rows.iter().all(|r| r[6] == "true" && r[7] == "true"));
}

#[test]
fn densities_oracle_agrees() {
    let out = run(&["densities", "--q", "5", "--oracle"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["result"]["report"]["alpha"], "437/3125");
    assert_eq!(v["result"]["oracle"]["alpha_exhaustive"], "437/3125");
    assert_eq!(v["result"]["report"]["identity_residual"], "0/1");
    assert_eq!(v["config"]["q"], 5);
}

#[test]
fn verify_algebra_all_pass() {
    let out = run(&["verify-algebra", "--p", "23", "--trials", "1000"]);
    assert!(out.status.success());
    let v = json(&out);
    let outcomes = v["result"].as_array().unwrap();
    assert_eq!(outcomes.len(), 4);
    assert!(outcomes.iter().all(|o| o["passed"] == true));
}

#[test]
fn failed_checks_exit_nonzero_with_a_record() {
    let out = run(&["verify-algebra", "--p", "19", "--trials", "10"]);
    assert_eq!(out.status.code(), Some(1));
    let rec: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(rec["status"], "failed");
    assert!(!rec["failures"].as_array().unwrap().is_empty());
}

#[test]
fn invalid_config_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    std::fs::write(&path, "p = 23\ncolour = blue\n").unwrap();
    let out = run(&["geography", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let rec: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(rec["status"], "invalid-config");
    assert_eq!(run(&["densities", "--q", "4"]).status.code(), Some(2));
}

#[test]
fn config_file_is_overridden_by_flags_and_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    let report = dir.path().join("report.json");
    std::fs::write(&conf, "# densities at q = 7\nq = 7\nseed = 9\nformat = csv\n").unwrap();
    let out = run(&[
        "densities",
        "--config",
        conf.to_str().unwrap(),
        "--format",
        "json",
        "--q",
        "5",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!(v["config"]["q"], 5);
    assert_eq!(v["config"]["seed"], 9);
    assert_eq!(v["config"]["format"], "json");
    assert_eq!(v["result"]["report"]["q_v"], 5);
}

#[test]
fn reports_are_independent_of_thread_count() {
    let args = [
        "densities",
        "--q",
        "5",
        "--n-samples",
        "20000",
        "--d",
        "1",
        "--seed",
        "3",
    ];
    let one = Command::new(env!("CARGO_BIN_EXE_d4selmer"))
        .args(args)
        .env("RAYON_NUM_THREADS", "1")
        .output()
        .unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_d4selmer"))
        .args(args)
        .env("RAYON_NUM_THREADS", "8")
        .output()
        .unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
    let v: Value = serde_json::from_slice(&one.stdout).unwrap();
    assert_eq!(v["result"]["report"]["mc_estimate"]["seed"], 3);
    assert_eq!(v["result"]["report"]["mc_within_tolerance"], true);
}

#[test]
fn curves_batch() {
    let out = run(&[
        "curves",
        "--p",
        "5",
        "--d",
        "1",
        "--n-samples",
        "30",
        "--oracle",
        "--format",
        "csv",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 30);
    for r in rows.iter().filter(|r| r[5] == "true") {
        // Members of X_D have only nodal bad fibres.
        assert!(r[8].split(' ').all(|s| s.ends_with(":I1")), "{r:?}");
    }
}

#[test]
fn stabilizer_batch() {
    let out = run(&["stabilizer-check", "--n-samples", "20", "--format", "csv"]);
    assert!(out.status.success());
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 20);
    assert!(rows.iter().all(|r| r[4] == r[6] && r[6] == r[7]));
}

#[test]
fn geography_reports_the_slope_constant() {
    let out = run(&["geography", "--d", "2"]);
    assert!(out.status.success());
    let v = json(&out);
    let slopes = v["result"]["slopes"].as_array().unwrap();
    assert_eq!(slopes.len(), 8);
    assert!(slopes
        .iter()
        .all(|s| s["lowest_constant"] == "-4" && s["positivity"] == true));
}

#[test]
fn reduce_orbit_passes() {
    let out = run(&["reduce-orbit", "--n-samples", "20", "--trials", "100"]);
    assert!(out.status.success());
}

#[test]
fn all_runs_every_criterion() {
    let out = run(&[
        "all",
        "--trials",
        "100",
        "--n-samples",
        "20000",
        "--d",
        "1",
        "--format",
        "csv",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&out);
    assert_eq!(
        rows.iter().map(|r| r[0].parse::<u8>().unwrap()).collect::<Vec<_>>(),
        (1..=11).collect::<Vec<_>>()
    );
}
