use std::process::{Command, Output};

use serde_json::Value;

fn dmlat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dmlat")).args(args).output().expect("spawn dmlat")
}

fn json(args: &[&str]) -> (i32, Value) {
    let out = dmlat(args);
    let v = serde_json::from_slice(&out.stdout).expect("single JSON object");
    (out.status.code().unwrap(), v)
}

#[test]
fn euler_prints_chi_and_volume() {
    let out = dmlat(&["euler", "4", "4", "6"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("chi = 13/48, volume = 13/18 · π²"));
}

#[test]
fn euler_json_uses_rational_pairs() {
    let (code, v) = json(&["euler", "4", "4", "5", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(v["sections"]["euler"]["chi"], serde_json::json!({"num": 99, "den": 400}));
    assert!(v["warnings"].as_array().unwrap().iter().any(|w| w.as_str().unwrap().contains("297/400")));
}

#[test]
fn kneg_lattice_passes_with_warnings() {
    let (code, v) = json(&["check", "6", "6", "3", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema_version"], "dmlat-report/1");
    assert_eq!(v["signature"], serde_json::json!([6, 6, 3]));
    assert_eq!(v["overall"], "pass-with-warnings");
    let params = &v["sections"]["parameters"]["params"];
    assert_eq!(params["k_prime"], -3);
    assert_eq!(params["l_prime"], "inf");
    assert_eq!(params["alpha"], serde_json::json!({"num": 5, "den": 6}));
}

#[test]
fn json_is_deterministic() {
    let a = dmlat(&["check", "4", "4", "6", "--json", "--seed", "11"]);
    let b = dmlat(&["check", "4", "4", "6", "--json", "--seed", "11"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn check_all_exits_zero() {
    let (code, v) = json(&["check", "--all", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(v["reports"].as_array().unwrap().len(), 13);
    assert_ne!(v["overall"], "fail");
}

#[test]
fn non_catalog_needs_force() {
    let out = dmlat(&["check", "9", "9", "9"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not a catalog signature (use --force for exploratory mode)"));

    let (_, v) = json(&["check", "9", "9", "9", "--force", "--json"]);
    assert_eq!(v["exploratory"], true);
    assert!(v["sections"].get("euler").is_none());

    assert_eq!(dmlat(&["euler", "9", "9", "9", "--force"]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(dmlat(&[]).status.code(), Some(2));
    assert_eq!(dmlat(&["check"]).status.code(), Some(2));
    assert_eq!(dmlat(&["check", "--all", "4", "4", "6"]).status.code(), Some(2));
    assert_eq!(dmlat(&["vertices", "4", "x", "6"]).status.code(), Some(2));
    assert_eq!(dmlat(&["tessellate", "4", "4", "6", "--ridge", "bogus"]).status.code(), Some(2));
    assert_eq!(dmlat(&["tessellate", "6", "6", "3", "--ridge", "Kinv,R0"]).status.code(), Some(2));
}

#[test]
fn tessellate_json() {
    let (code, v) = json(&["tessellate", "4", "4", "6", "--ridge", "K,R1", "--samples", "100", "--json"]);
    assert_eq!(code, 0);
    let rows = v["sections"]["tessellation"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r["matches"] == r["samples"]));
}

#[test]
fn vertices_dump_lists_24() {
    let out = dmlat(&["vertices", "4", "4", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().filter(|l| l.trim_start().starts_with('v')).count(), 24);
}
