use std::fs;
use std::path::Path;
use std::process::Command;

use semistd::harness::{self, ExperimentConfig, PolynomialSpec};
use semistd::Error;

fn config(freq: &str, out: &Path) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(PolynomialSpec::Named("semi-standard".into()), freq);
    c.n_max = 200;
    c.out = out.to_path_buf();
    c
}

fn artifacts(dir: &Path) -> Vec<Vec<u8>> {
    ["coeffs.csv", "audit.json", "bounds.json"].iter().map(|f| fs::read(dir.join(f)).unwrap()).collect()
}

#[test]
fn golden_run_passes_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("surd:-1,1,5,2", dir.path());
    let first = harness::run(&cfg).unwrap();
    assert!(first.passed(), "{:?}", first.audit_counts());
    assert!(!first.cache_hit);
    let a = artifacts(dir.path());

    let second = harness::run(&cfg).unwrap();
    assert!(second.cache_hit);
    assert_eq!(a, artifacts(dir.path()));

    let mut uncached = cfg.clone();
    uncached.cache.enabled = false;
    harness::run(&uncached).unwrap();
    assert_eq!(a, artifacts(dir.path()));
}

#[test]
fn window_beyond_n_max_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config("surd:-1,1,5,2", dir.path());
    cfg.window = Some((100, 400));
    assert!(matches!(harness::run(&cfg), Err(Error::Config(_))));
}

#[test]
fn rational_frequency_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    for spec in ["cf:[0;2,3]", "surd:1,1,9,2"] {
        assert!(matches!(harness::run(&config(spec, dir.path())), Err(Error::RationalFrequency(_))), "{spec}");
    }
}

#[test]
fn sweep_needs_two_frequencies() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config("surd:-1,1,5,2", dir.path());
    cfg.frequencies = Some(vec!["surd:-1,1,5,2".into()]);
    assert!(matches!(harness::sweep(&cfg), Err(Error::Config(_))));
}

#[test]
fn sweep_keeps_invalid_rows_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config("surd:-1,1,5,2", dir.path());
    cfg.frequencies = Some(vec!["surd:-1,1,5,2".into(), "cf:[0;2,3]".into(), "nonsense".into(), "surd:-1,1,2,1".into()]);
    let r = harness::sweep(&cfg).unwrap();
    let status: Vec<bool> = r.rows.iter().map(|row| row.status == "ok").collect();
    assert_eq!(status, [true, false, false, true]);
    assert_eq!(r.rows[1].frequency, "cf:[0;2,3]");
    assert!(r.rows[1].error_value.is_none());
    assert!(r.spread.is_some());
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
}

fn cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_semistd")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();

    let (code, text) = cli(&["cf", "surd:-1,1,5,2", "--depth", "4"]);
    assert_eq!(code, 0);
    assert_eq!(text, "k,a_k,p_k,q_k\n0,0,0,1\n1,1,1,1\n2,1,1,2\n3,1,2,3\n");

    assert_eq!(cli(&["verify", "--nmax", "120", "--out", out]).0, 0);
    assert!(dir.path().join("audit.json").exists());

    assert_eq!(cli(&["verify", "--frequency", "cf:[0;2,3]", "--out", out]).0, 2);
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"polynomial": "semi-standard", "unknown": 1}"#).unwrap();
    assert_eq!(cli(&["verify", "--config", bad.to_str().unwrap(), "--out", out]).0, 2);

    // ||2 alpha|| is far below 2^-64
    let (code, _) = cli(&["linearize", "--frequency", "cf:[0;2,(1000000000000000000000000)]", "--nmax", "10", "--out", out]);
    assert_eq!(code, 3);
}
