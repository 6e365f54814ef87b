use serde_json::Value;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reflectron"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn optimal_distance_example() {
    let v = json(&["distance", "--n", "2", "--alpha", "pi", "--algo", "optimal", "--dense"]);
    assert_eq!(v["schema"], 1);
    assert!((v["value"].as_f64().unwrap() - 1.6).abs() < 1e-9);
    assert!((v["dense_value"].as_f64().unwrap() - 1.6).abs() < 1e-9);
    assert_eq!(v["branch"], "B");
}

#[test]
fn landscape_row_count() {
    let out = run(&["landscape", "--n", "4", "--grid", "257"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,u,value"));
    assert_eq!(lines.count(), 257 * 257);
}

#[test]
fn theta_star_csv() {
    let out = run(&["theta-star", "--n", "4", "--alpha", "pi,pi/2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("alpha,theta_star,distance\n"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn json_tables_carry_schema() {
    let v = json(&["theta-star", "--n", "2", "--points", "3", "--format", "json"]);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn identical_config_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let p = path.to_str().unwrap();
        let out = run(&[
            "universal",
            "verify",
            "--d",
            "2",
            "--eps",
            "0.2",
            "--targets",
            "3",
            "--trials",
            "200",
            "--seed",
            "7",
            "--out",
            p,
        ]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn validation_errors_exit_one() {
    for args in [
        vec!["distance", "--n", "0"],
        vec!["distance", "--n", "2", "--alpha", "tau"],
        vec!["circuit", "emit", "--n", "4", "--theta", "pi"],
        vec!["frobnicate"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert_eq!(err.lines().count(), 1);
        let line: Value = serde_json::from_str(err.trim()).unwrap();
        assert!(line["error"].is_string() && line["message"].is_string());
    }
}

#[test]
fn circuit_emit_and_verify() {
    let out = run(&["circuit", "emit", "--n", "1", "--theta", "pi"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# registers: ancilla=1 system=1 program=1\n"));
    assert_eq!(text.lines().filter(|l| l.starts_with("CSWAP")).count(), 2);
    let v = json(&["circuit", "verify", "--n", "3"]);
    assert_eq!(v["pass"], true);
}

#[test]
fn lowerbound_subcommands() {
    let v = json(&["lowerbound", "solve-q", "--n", "4"]);
    assert!(v["residual"].as_f64().unwrap() < 1e-8);
    let v = json(&["lowerbound", "twirl", "--n", "2", "--d", "2"]);
    assert!((v["entropy"].as_f64().unwrap() - 6f64.log2()).abs() < 1e-6);
    let v = json(&["lowerbound", "fd", "--eps", "1e-6", "--d", "3"]);
    assert!(v["final_bound"]["valid"].as_bool().unwrap());
}

#[test]
fn universal_budget_example() {
    let v = json(&["universal", "budget", "--d", "2", "--eps", "0.1"]);
    assert_eq!(v["k_bits"], 8);
    assert_eq!(v["rotations"][0]["n"], 283);
}

#[test]
fn mr_and_lmr() {
    let v = json(&["mr", "--n", "4", "--d", "2"]);
    assert!((v["value"].as_f64().unwrap() - 40.0 / 42.0).abs() < 1e-9);
    let v = json(&["lmr", "--n", "4", "--alpha", "pi", "--instances", "5"]);
    assert!((v["equal_angle_distance"].as_f64().unwrap() - 1.875).abs() < 1e-9);
    assert!(v["dense_max_diff"].as_f64().unwrap() < 1e-10);
}

#[test]
fn selftest_passes() {
    let out = run(&["selftest"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn budget_env_var_is_honored() {
    let out = Command::new(env!("CARGO_BIN_EXE_reflectron"))
        .args(["circuit", "verify", "--n", "7"])
        .env("REFLECTRON_BUDGET", "1024")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}
