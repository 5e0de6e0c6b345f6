use std::process::{Command, Output};

use relu_distortion::cli::RunConfig;
use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relu-distortion"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let o = bin(&full);
    (o.status.code().unwrap(), serde_json::from_str(&stdout(&o)).expect("valid json"))
}

#[test]
fn psi_values() {
    let (code, v) = json(&["psi", "--theta", "1.0471975511965976"]);
    assert_eq!(code, 0);
    let psi = v["records"][0]["psi"].as_f64().unwrap();
    assert!((psi - 0.10899778104).abs() < 1e-10);

    let (_, v) = json(&["psi", "--theta", "0"]);
    assert_eq!(v["records"][0]["psi"].as_f64().unwrap(), 0.0);
    assert_eq!(v["records"][0]["unit_shrinkage_ratio"].as_f64().unwrap(), 0.5);
}

#[test]
fn expect_antipodal_plug_in() {
    let (code, v) = json(&["expect", "--theta", "180", "--deg"]);
    assert_eq!(code, 0);
    let recs = v["records"].as_array().unwrap();
    assert_eq!(recs[0]["claim"], "Corrected");
    assert_eq!(recs[0]["value"].as_f64().unwrap(), 1.0);
    assert_eq!(recs[1]["value"].as_f64().unwrap(), 3.0);
    assert_eq!(recs[0]["bound_lower"].as_f64().unwrap(), 1.0);
    assert_eq!(recs[0]["bound_upper"].as_f64().unwrap(), 2.0);
}

#[test]
fn refute_orthogonal_pair() {
    let (code, v) = json(&["refute", "--theta", "90", "--deg"]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "SupportsCorrected");
    let rec = &v["records"][0];
    assert!(rec["z_corrected"].as_f64().unwrap().abs() < 4.0);
    assert!(rec["z_original"].as_f64().unwrap().abs() > 10.0);
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["config", "records", "verdict", "provenance"]);
}

#[test]
fn refute_exit_codes() {
    let o = bin(&["refute", "--z-reject", "1000", "--m", "64", "--trials", "50"]);
    assert_eq!(o.status.code(), Some(3));
    let o = bin(&["refute", "--theta", "0.01"]);
    assert_eq!(o.status.code(), Some(2));
    let o = bin(&["refute", "--m", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--m"));
}

#[test]
fn config_echo_round_trips() {
    let (_, v) = json(&["theta-sweep", "--grid", "3", "--m", "64", "--trials", "10", "--seed", "9"]);
    let echoed: RunConfig = serde_json::from_value(v["config"].clone()).unwrap();
    assert_eq!((echoed.grid, echoed.m, echoed.trials, echoed.seed), (3, 64, 10, 9));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, serde_json::to_string(&v["config"]).unwrap()).unwrap();
    let (_, again) = json(&["theta-sweep", "--config", path.to_str().unwrap()]);
    assert_eq!(again["records"], v["records"]);
}

#[test]
fn csv_and_json_digits_match() {
    let args = ["theta-sweep", "--grid", "5", "--m", "128", "--trials", "20"];
    let csv = stdout(&bin(&args));
    let (_, v) = json(&args);
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    for (line, rec) in lines.zip(v["records"].as_array().unwrap()) {
        for (col, cell) in header.iter().zip(line.split(',')) {
            assert_eq!(cell, rec[*col].to_string(), "column {col}");
        }
    }
}

#[test]
fn identical_runs_are_byte_identical_across_threads() {
    let args = ["angle", "--grid", "7", "--m", "256", "--trials", "30", "--format", "json"];
    let one = bin(&[&args[..], &["--threads", "1"]].concat());
    let four = bin(&[&args[..], &["--threads", "4"]].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn concentration_reports_slope() {
    let (code, v) = json(&["concentration", "--m-list", "64,256,1024", "--trials", "100"]);
    assert_eq!(code, 0);
    let slope = v["summary"]["loglog_slope"].as_f64().unwrap();
    assert!((-0.7..=-0.3).contains(&slope), "{slope}");
}

#[test]
fn meanwidth_from_points_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k.csv");
    std::fs::write(&path, "1,0,0\n0,1,0\n").unwrap();
    let (code, v) = json(&["meanwidth", "--points", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let rec = &v["records"][0];
    assert_eq!(rec["dim"], 3);
    let z = (rec["mc_mean"].as_f64().unwrap() - 2.0 / std::f64::consts::PI.sqrt()) / rec["mc_stderr"].as_f64().unwrap();
    assert!(z.abs() < 4.0);
}

#[test]
fn separate_and_depth_run() {
    let (code, v) = json(&["separate", "--m", "256", "--trials", "4", "--points-per-class", "5"]);
    assert_eq!(code, 0);
    assert_eq!(v["records"].as_array().unwrap().len(), 2);
    let (code, v) = json(&["depth", "--layers", "3", "--m", "512", "--trials", "10"]);
    assert_eq!(code, 0);
    assert_eq!(v["records"].as_array().unwrap().len(), 4);
}

#[test]
fn selftest_passes() {
    let o = bin(&["selftest"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 10);
}
