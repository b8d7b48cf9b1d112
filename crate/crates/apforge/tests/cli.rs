use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_apforge");
const BOUNDARY: [&str; 4] = ["--delta-i", "-10", "--delta-f", "10"];

fn apforge(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env("APFORGE_THREADS", "1").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn solve_to(path: &Path, v: &str) {
    let mut args = vec!["solve", "--v", v, "--out", path.to_str().unwrap()];
    args.extend(BOUNDARY);
    let o = apforge(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

/// Parses `check,status,...` rows into (check, status) pairs.
fn check_statuses(csv: &str) -> Vec<(String, String)> {
    csv.lines()
        .skip(1)
        .map(|l| {
            let mut f = l.split(',');
            (f.next().unwrap().to_string(), f.next().unwrap().to_string())
        })
        .collect()
}

fn status_of<'a>(rows: &'a [(String, String)], check: &str) -> &'a str {
    &rows.iter().find(|(c, _)| c == check).unwrap().1
}

#[test]
fn solve_then_verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    solve_to(&path, "0.35");
    let report: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["sequence"]["m"], 2);
    assert_eq!(report["branch"], "interior");
    assert!(report["fidelity_error"].as_f64().unwrap() < -9.0);

    let o = apforge(&["verify", "--input", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    let rows = check_statuses(&stdout(&o));
    assert!(rows.len() >= 8);
    assert!(rows.iter().all(|(_, s)| s == "pass"));
}

#[test]
fn perturbed_tau2_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    solve_to(&path, "0.35");
    let mut report: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let tau2 = report["sequence"]["tau2"].as_f64().unwrap();
    report["sequence"]["tau2"] = (tau2 + 0.1).into();
    fs::write(&path, serde_json::to_string(&report).unwrap()).unwrap();

    let o = apforge(&["verify", "--input", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let rows = check_statuses(&stdout(&o));
    assert_eq!(status_of(&rows, "optimality"), "fail");
    assert_eq!(status_of(&rows, "fidelity"), "fail");
    assert_eq!(status_of(&rows, "area"), "pass");
}

#[test]
fn single_off_pulse_reports_vacuous_optimality() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    solve_to(&path, "1.0");
    let o = apforge(&["verify", "--input", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(status_of(&check_statuses(&stdout(&o)), "optimality"), "vacuous-pass");
}

#[test]
fn malformed_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{ not json").unwrap();
    assert_eq!(apforge(&["verify", "--input", path.to_str().unwrap()]).status.code(), Some(1));
    let missing = dir.path().join("missing.json");
    assert_eq!(apforge(&["verify", "--input", missing.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn reversed_boundary_exits_one() {
    let o = apforge(&["solve", "--theta-i", "1.0", "--theta-f", "2.0", "--v", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let o =
        apforge(&["solve", "--theta-i", "2.0", "--theta-f", "1.0", "--delta-i", "-1", "--delta-f", "1", "--v", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_thread_count_exits_one() {
    let mut args = vec!["staircase", "--v-start", "0.3", "--v-stop", "0.3", "--v-count", "1"];
    args.extend(BOUNDARY);
    let o = Command::new(BIN).args(&args).env("APFORGE_THREADS", "zero").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    assert_eq!(apforge(&["--help"]).status.code(), Some(0));
    assert_eq!(apforge(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn output_is_deterministic() {
    let mut args = vec!["solve", "--v", "0.5"];
    args.extend(BOUNDARY);
    let a = apforge(&args);
    let b = apforge(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let mut args = vec!["staircase", "--v-start", "0.2", "--v-stop", "1.0", "--v-count", "6"];
    args.extend(BOUNDARY);
    let serial = apforge(&args);
    let parallel = Command::new(BIN).args(&args).env("APFORGE_THREADS", "3").output().unwrap();
    assert_eq!(serial.stdout, parallel.stdout);
}

#[test]
fn single_point_staircase() {
    let mut args = vec!["staircase", "--v-start", "0.35", "--v-stop", "0.35", "--v-count", "1"];
    args.extend(BOUNDARY);
    let o = apforge(&args);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, ["v,m,T_rescaled,T_physical,status", lines[1]]);
    assert!(lines[1].starts_with("0.35,2,"));
    assert!(lines[1].ends_with(",ok"));
}

#[test]
fn staircase_json_matches_csv() {
    let mut args = vec!["staircase", "--v-start", "0.3", "--v-stop", "0.9", "--v-count", "3", "--format", "json"];
    args.extend(BOUNDARY);
    let rows: Vec<Value> = serde_json::from_slice(&apforge(&args).stdout).unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[2]["m"], 1);
    assert_eq!(rows[0]["status"], "ok");
}

#[test]
fn resonance_table() {
    let mut args = vec!["resonances", "--k-max", "4"];
    args.extend(BOUNDARY);
    let o = apforge(&args);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,u,T_rescaled,T_physical,return_residual,area_residual"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|f| f.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 4);
    assert!((rows[0][1] - 0.529975).abs() < 5e-6);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r[0], (i + 1) as f64);
        assert!(r[4] < 1e-12 && r[5] < 1e-12);
    }
}

fn last_row(path: &Path) -> Vec<f64> {
    let text = fs::read_to_string(path).unwrap();
    text.lines().last().unwrap().split(',').map(|f| f.parse().unwrap()).collect()
}

#[test]
fn simulate_closes_at_north_pole() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    solve_to(&path, "0.35");
    let out = dir.path().join("sim");
    let o = apforge(&["simulate", "--input", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["original.csv", "adiabatic.csv", "waveform.csv"] {
        assert!(fs::read_to_string(out.join(name)).unwrap().lines().count() > 400);
    }
    // columns: t,tau,theta,delta,re_c1,im_c1,re_c2,im_c2,sx,sy,sz,gap
    let end = last_row(&out.join("adiabatic.csv"));
    assert!((end[10] - 1.0).abs() < 1e-8);
    assert!((end[2] - 0.09966865249116204).abs() < 1e-9);
}

#[test]
fn resonant_constant_control_transfers() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rc");
    let mut args = vec!["simulate", "--rc-k", "1", "--out", out.to_str().unwrap()];
    args.extend(BOUNDARY);
    let o = apforge(&args);
    assert!(o.status.success());
    let end = last_row(&out.join("adiabatic.csv"));
    assert!((end[10] - 1.0).abs() < 1e-8);
    let fidelity = stdout(&o).lines().find_map(|l| l.strip_prefix("fidelity_error=")).unwrap().parse::<f64>().unwrap();
    assert!(fidelity < -9.0);
}

#[test]
fn zero_length_sequence_gives_two_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("z");
    let o = apforge(&[
        "simulate",
        "--theta-i",
        "1.5",
        "--theta-f",
        "1.0",
        "--v",
        "1",
        "--m",
        "1",
        "--tau1",
        "0",
        "--tau2",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["original.csv", "adiabatic.csv", "waveform.csv"] {
        let text = fs::read_to_string(out.join(name)).unwrap();
        let rows: Vec<&str> = text.lines().skip(1).collect();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0], rows[1]);
    }
}
