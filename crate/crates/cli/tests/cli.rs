use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn lis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lis")).args(args).output().expect("binary runs")
}

fn descriptor(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../descriptors").join(name).to_string_lossy().into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lis-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON report on stdout")
}

#[test]
fn suite_passes_on_cat() {
    let o = lis(&["suite", "--model", "cat"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&o);
    assert_eq!(r["ok"], true);
    assert!(r["checks"].as_array().unwrap().len() >= 8);
}

#[test]
fn malformed_json_is_a_parse_error() {
    let path = scratch("bad.json");
    std::fs::write(&path, "{\"model\": \"cat\", ").unwrap();
    assert_eq!(code(&lis(&["verify", path.to_str().unwrap()])), 2);
    let unknown = scratch("unknown_field.json");
    std::fs::write(&unknown, r#"{"model":"cat","h_u":{"type":"spline"},"h_s":{"type":"const","params":{"value":1}},"profile":{"kind":"linear"}}"#).unwrap();
    assert_eq!(code(&lis(&["verify", unknown.to_str().unwrap()])), 2);
    assert_eq!(code(&lis(&["verify", "/nonexistent/system.json"])), 2);
}

#[test]
fn da_precondition_violation() {
    assert_eq!(code(&lis(&["da-check", "--nubar", "2.0", "--mu", "1.0"])), 2);
    let o = lis(&["da-check", "--nubar", "0.5", "--grid", "41"]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["payload"]["non_anosov_certificate"], true);
}

#[test]
fn skeleton_csv_shape_and_determinism() {
    let (a, b) = (scratch("skel_a.csv"), scratch("skel_b.csv"));
    for p in [&a, &b] {
        let o = lis(&["skeleton", &descriptor("cosine_steep.json"), "--grid", "16", "--out", p.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text.lines().count(), 257);
    assert_eq!(text.lines().next().unwrap(), "u,v,theta,s_star,residual,normal_expansion");
    let first: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(first.len(), 6);
    assert!(first.iter().all(|c| c.contains('e') && c.split('e').next().unwrap().replace(['-', '.'], "").len() == 15));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn empty_grid_gives_header_only() {
    let p = scratch("empty.csv");
    let o = lis(&["skeleton", &descriptor("exponential_symmetric.json"), "--grid", "0", "--out", p.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read_to_string(&p).unwrap(), "u,v,theta,s_star,residual,normal_expansion\n");
    let o = lis(&["skeleton", &descriptor("exponential_symmetric.json"), "--grid", "4", "--out", p.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn unwritable_path_exits_3() {
    let o = lis(&["skeleton", &descriptor("exponential_symmetric.json"), "--grid", "8", "--out", "/nonexistent/dir/skel.csv"]);
    assert_eq!(code(&o), 3);
    assert_eq!(code(&lis(&["suite", "--model", "geodesic-local", "--out", "/nonexistent/dir/r.json"])), 3);
}

#[test]
fn verify_reports_and_is_deterministic() {
    let args = ["verify", &descriptor("general_profile.json"), "--grid", "12", "--random", "200", "--seed", "5"];
    let (a, b) = (lis(&args), lis(&args));
    assert_eq!(code(&a), 0);
    let (ra, rb) = (report(&a), report(&b));
    assert_eq!(ra["payload"], rb["payload"]);
    assert_eq!(ra["config_hash"], rb["config_hash"]);
    assert_eq!(ra["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(ra["seed"], 5);
    for key in ["min_density", "argmin", "contact_densities", "ok"] {
        assert!(ra["payload"].get(key).is_some(), "missing {key}");
    }
    let other = lis(&["verify", &descriptor("general_profile.json"), "--grid", "12", "--random", "200", "--seed", "6"]);
    assert_ne!(report(&other)["config_hash"], ra["config_hash"]);
}

#[test]
fn non_contact_pair_fails_verification() {
    let o = lis(&["verify", &descriptor("cosine_cat.json"), "--grid", "12", "--random", "50"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAIL contact"));
    let narrow = lis(&["verify", &descriptor("cosine_cat.json"), "--grid", "12", "--window", "-1,3"]);
    assert_eq!(code(&narrow), 1);
    assert_eq!(report(&narrow)["checks"][0]["pass"], false);
}

#[test]
fn flow_writes_trajectory() {
    let p = scratch("traj.csv");
    let o = lis(&[
        "flow", &descriptor("exponential_symmetric.json"), "--start", "1,0.2,0.3,0.4", "--T", "-5", "--dt", "0.01", "--out",
        p.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&p).unwrap();
    assert_eq!(text.lines().count(), 502);
    let end = report(&o)["payload"]["end"]["s"].as_f64().unwrap();
    assert!(end.abs() < 2e-4);
    assert_eq!(code(&lis(&["flow", &descriptor("exponential_symmetric.json"), "--start", "1,0", "--T", "1", "--out", p.to_str().unwrap()])), 2);
}

#[test]
fn bunching_and_persist() {
    let o = lis(&["bunching", "cat", "--tmax", "16", "--orbits", "8", "--seed", "3"]);
    assert_eq!(code(&o), 0);
    assert!((report(&o)["payload"]["b_s"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(code(&lis(&["bunching", "torus"])), 2);
    let o = lis(&["persist", &descriptor("exponential_symmetric.json"), "--eps-list", "1e-2,1e-3,1e-4", "--grid", "8"]);
    assert_eq!(code(&o), 0);
    let ratio = report(&o)["payload"]["reports"][1]["ratio"].as_f64().unwrap();
    assert!((ratio - 0.5).abs() < 5e-3);
}

#[test]
fn thread_count_does_not_change_payload() {
    let run = |threads: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_lis"))
            .args(["bunching", "da-chart", "--tmax", "8", "--orbits", "32", "--seed", "4"])
            .env("LIS_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(code(&o), 0);
        report(&o)["payload"].clone()
    };
    assert_eq!(run("1"), run("4"));
    let bad = Command::new(env!("CARGO_BIN_EXE_lis")).args(["suite"]).env("LIS_THREADS", "many").output().unwrap();
    assert_eq!(code(&bad), 2);
}
