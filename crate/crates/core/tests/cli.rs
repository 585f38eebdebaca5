//! Drives the `rothcheck` binary: exit codes, output files, environment
//! overrides and byte-identical suite reports.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_rothcheck"));
    for var in ["INPUT", "OUTPUT", "PRECISION", "SEED", "MAX_LATTICE", "MAX_PLUCKER"] {
        c.env_remove(format!("ROTHCHECK_{var}"));
    }
    c
}

fn instance(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("instances").join(name)
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rothcheck-it-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn melb_instance_exits_zero() {
    let out = bin().args(["melb", "--input"]).arg(instance("sqrt2_melb.toml")).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["command"], "melb");
    assert_eq!(v["verdict"], "True");
    assert_eq!(v["precision"], 128);
}

#[test]
fn false_verdict_exits_one() {
    let input = scratch("ss_false.toml");
    std::fs::write(&input, "q = 2\nr = [12, 1]\ndelta = \"1/5\"\nt_x = \"3/2\"\n").unwrap();
    let out = bin().args(["ss-check", "--input"]).arg(&input).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verdict"], "False");
    assert!(String::from_utf8_lossy(&out.stderr).contains("False"));
}

#[test]
fn malformed_input_exits_two() {
    let bad = scratch("bad.toml");
    for body in ["n = [2\n", "n = 2\nt = \"1/2\"\nextra = 1\n", "n = 2\n"] {
        std::fs::write(&bad, body).unwrap();
        let out = bin().args(["combi", "--input"]).arg(&bad).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{body:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
    let missing = bin().args(["combi", "--input", "/nonexistent/rothcheck.toml"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
    let low = bin().args(["combi", "--precision", "8", "--input"]).arg(instance("combi.toml")).output().unwrap();
    assert_eq!(low.status.code(), Some(2));
}

#[test]
fn environment_supplies_defaults_and_flags_override_it() {
    let out = bin()
        .arg("combi")
        .env("ROTHCHECK_INPUT", instance("combi.toml"))
        .env("ROTHCHECK_PRECISION", "64")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["precision"], 64);
    let out = bin()
        .args(["combi", "--precision", "96"])
        .env("ROTHCHECK_INPUT", instance("combi.toml"))
        .env("ROTHCHECK_PRECISION", "64")
        .output()
        .unwrap();
    assert_eq!(json(&out)["precision"], 96);
}

#[test]
fn output_file_receives_the_report() {
    let path = scratch("height.json");
    let out = bin().args(["height", "--input"]).arg(instance("height.toml")).arg("--output").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let written: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(written["command"], "height");
}

#[test]
fn suite_reports_are_byte_identical() {
    let run = || {
        let out = bin().args(["suite", "--seed", "7", "--precision", "128"]).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        out.stdout
    };
    let first = run();
    assert_eq!(first, run());
    let v: serde_json::Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(v["report"]["criteria"].as_array().unwrap().len(), 12);
}
