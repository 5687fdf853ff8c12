use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn cascade(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cascade"))
        .args(args)
        .current_dir(cwd)
        .env_remove("CASCADE_OUT_DIR")
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn manifest_rows(dir: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(dir.join("manifest.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn recurse_writes_five_snapshots_with_checksums() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cascade(
        &["recurse", "--delta", "0.01", "--xmax", "50", "--nmax", "100", "--snapshots", "20,40,60,80,100"],
        tmp.path(),
    );
    assert!(out.status.success());
    let dir = tmp.path().join("out");
    let rows = manifest_rows(&dir);
    let names: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(names, ["pn_20.csv", "pn_40.csv", "pn_60.csv", "pn_80.csv", "pn_100.csv", "run.cfg"]);
    for row in &rows {
        let bytes = fs::read(dir.join(&row[0])).unwrap();
        assert_eq!(row[1], hex::encode(Sha256::digest(&bytes)));
        assert_eq!(row[2], bytes.len().to_string());
    }
    let p100 = fs::read_to_string(dir.join("pn_100.csv")).unwrap();
    assert_eq!(p100.lines().next(), Some("x,p"));
    assert_eq!(p100.lines().count(), 5002);
}

#[test]
fn env_var_sets_default_output_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let target = tmp.path().join("from-env");
    let status = Command::new(env!("CARGO_BIN_EXE_cascade"))
        .args(["simulate", "--x", "0.5", "--trials", "50"])
        .current_dir(tmp.path())
        .env("CASCADE_OUT_DIR", &target)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(target.join("empirical_cdf.csv").exists());
}

#[test]
fn flags_override_config_and_run_cfg_replays() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("sweep.cfg"), "# coarse\nx = 2\ntrials = 400\nseed = 3\n").unwrap();
    let out = cascade(&["simulate", "--config", "sweep.cfg", "--trials", "200", "--out", "a"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let cfg = fs::read_to_string(tmp.path().join("a/run.cfg")).unwrap();
    assert_eq!(cfg, "# command: simulate\nseed=3\ntrials=200\nx=2\n");

    let out = cascade(&["simulate", "--config", "a/run.cfg", "--out", "b"], tmp.path());
    assert!(out.status.success());
    let a = fs::read(tmp.path().join("a/empirical_cdf.csv")).unwrap();
    let b = fs::read(tmp.path().join("b/empirical_cdf.csv")).unwrap();
    assert_eq!(a, b);
    assert_eq!(String::from_utf8(a).unwrap().lines().filter(|l| !l.starts_with('n')).count(), 31);
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path();
    assert_eq!(cascade(&["bogus"], p).status.code(), Some(2));
    assert_eq!(cascade(&["simulate", "--trials", "10"], p).status.code(), Some(2));
    assert_eq!(cascade(&["recurse", "--delta", "-1"], p).status.code(), Some(2));
    assert_eq!(cascade(&["recurse", "--nmax", "100", "--xmax", "20"], p).status.code(), Some(2));
    fs::write(p.join("bad.cfg"), "no separator\n").unwrap();
    assert_eq!(cascade(&["recurse", "--config", "bad.cfg"], p).status.code(), Some(2));
    assert_eq!(cascade(&["front", "--delta", "0.05", "--nmax", "40"], p).status.code(), Some(3));
    fs::write(p.join("blocker"), "x").unwrap();
    let out = cascade(&["recurse", "--nmax", "5", "--out", "blocker/sub"], p);
    assert_eq!(out.status.code(), Some(4));
    assert!(!out.stderr.is_empty());
}

#[test]
fn alpha_scan_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cascade(&["alpha-scan", "--deltas", "0.01,0.001", "--nmax", "100"], tmp.path());
    assert!(out.status.success());
    let text = fs::read_to_string(tmp.path().join("out/alpha_scan.csv")).unwrap();
    let rows: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let (d, a) = l.split_once(',').unwrap();
            (d.parse().unwrap(), a.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 2);
    assert!((rows[0].1 - 0.9855).abs() < 0.005);
    assert!((rows[1].1 - 0.9977).abs() < 0.002);
    assert!(tmp.path().join("out/probe_0.001.csv").exists());
}

#[test]
fn compare_report_ends_with_ks_row() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cascade(&["compare", "--vertices", "100", "--trials", "500", "--seed", "1"], tmp.path());
    assert!(out.status.success());
    let text = fs::read_to_string(tmp.path().join("out/compare.csv")).unwrap();
    assert_eq!(text.lines().next(), Some("n,p_discrete,p_continuum"));
    assert!(text.lines().last().unwrap().starts_with("ks,"));
}

#[test]
fn brw_writes_moments_trajectories_and_probe() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cascade(
        &[
            "brw", "--generations", "2", "--trials", "20", "--probe-delta", "0.001", "--probe-generations", "100,200",
            "--probe-z", "-1,0,1",
        ],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = tmp.path().join("out");
    let traj = fs::read_to_string(dir.join("trajectories.csv")).unwrap();
    assert_eq!(traj.lines().count(), 1 + 20 * 3);
    let probe = fs::read_to_string(dir.join("limit_probe.csv")).unwrap();
    assert_eq!(probe.lines().count(), 1 + 3 * 2);
    assert!(dir.join("moments.csv").exists());

    let coarse = cascade(&["brw", "--generations", "1", "--trials", "5", "--probe-delta", "0.01"], tmp.path());
    assert_eq!(coarse.status.code(), Some(2));
}
