//! Drives the `mfscale` binary through every subcommand on a tiny pool
//! and pins the exit-code contract (0 success, 1 runtime, 2 config).

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_mfscale");

const TINY_CONFIG: &str = "\
[pool]
n_cases = 12
seed = 0

[sweep]
budget_fractions = [0.3]
compositions = [0.0, 1.0]
seeds = [0]
test_pairs = 3

[train]
epochs = 25
early_stop_patience = 25
warmup_epochs = 5

[network]
hidden_widths = [8]
";

fn mfscale(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .arg("--config")
        .arg(dir.join("exp.toml"))
        .arg("--out")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary launches")
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn pipeline_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    fs::write(dir.join("exp.toml"), TINY_CONFIG).unwrap();

    assert_ok(&mfscale(dir, &["generate"]));
    assert!(dir.join("pool/manifest.json").is_file());

    let out = mfscale(dir, &["compose", "--budget", "20000", "--dc", "0.5"]);
    assert_ok(&out);
    let sel: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(sel["total_cost"].as_f64().unwrap() <= 20000.0);
    assert_eq!(
        sel["samples"].as_array().unwrap().len() as u64,
        sel["n_low"].as_u64().unwrap() + sel["n_high"].as_u64().unwrap()
    );

    assert_ok(&mfscale(dir, &["train", "--budget", "20000", "--dc", "1.0"]));
    assert!(dir.join("model.bin").is_file());

    assert_ok(&mfscale(dir, &["sweep"]));
    let results = fs::read_to_string(dir.join("results.csv")).unwrap();
    let rows = results.lines().count();
    assert_eq!(rows, 4, "header + 2 cells + baseline, got:\n{results}");

    assert_ok(&mfscale(dir, &["analyze"]));
    for name in ["aggregates.csv", "fits.csv", "verdicts.csv", "summary.txt"] {
        assert!(dir.join("analysis").join(name).is_file(), "missing {name}");
    }

    assert_ok(&mfscale(dir, &["plot"]));
    assert!(dir.join("plots/mse_u.svg").is_file());
    assert!(dir.join("plots/mse_tau.svg").is_file());
}

#[test]
fn exit_codes_follow_the_contract() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    fs::write(dir.join("exp.toml"), TINY_CONFIG).unwrap();

    // Missing pool is a runtime failure with a pointer at the fix.
    let out = mfscale(dir, &["compose", "--budget", "100", "--dc", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("mfscale generate"));

    // Rejected config values exit 2 before any work happens.
    fs::write(dir.join("bad.toml"), "[pool]\nn_cases = 1\n").unwrap();
    let out = Command::new(BIN)
        .arg("--config")
        .arg(dir.join("bad.toml"))
        .arg("--out")
        .arg(dir)
        .arg("sweep")
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(2),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );

    // Clap usage errors share the config exit code.
    let out = Command::new(BIN).arg("compose").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_dir_env_var_applies_when_flag_is_absent() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    fs::write(dir.join("exp.toml"), TINY_CONFIG).unwrap();

    let out = Command::new(BIN)
        .arg("--config")
        .arg(dir.join("exp.toml"))
        .env("MFSCALE_OUT", dir.join("enved"))
        .args(["generate", "--cases", "4"])
        .output()
        .unwrap();
    assert_ok(&out);
    assert!(dir.join("enved/pool/manifest.json").is_file());
}
