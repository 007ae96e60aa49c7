use std::path::Path;
use std::process::{Command, Output};

fn mpal(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mpal"))
        .args(args)
        .current_dir(cwd)
        .env("MPAL_LOG", "off")
        .output()
        .unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn localize_writes_csv_with_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"model": {"lambda": [0, 1000000]}, "geometry": {"half_width": 3}}"#);
    let out = mpal(&["localize", "--config", &cfg, "--trials", "20", "--seed", "4", "--out", "res"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("res/localize.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "N,L,lambda,m,trials,passes,p_hat,ci_lo,ci_hi");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][5], "0");
    assert_eq!(rows[1][5], "20");
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let typo = write_config(dir.path(), r#"{"run": {"trails": 3}}"#);
    assert_eq!(mpal(&["localize", "--config", &typo], dir.path()).status.code(), Some(2));
    assert_eq!(mpal(&["localize", "--config", "missing.json"], dir.path()).status.code(), Some(2));
    assert_eq!(mpal(&["wegner", "--trials", "0"], dir.path()).status.code(), Some(2));
    assert_eq!(mpal(&["localize", "--cap", "3"], dir.path()).status.code(), Some(2));
    assert_eq!(mpal(&["frobnicate"], dir.path()).status.code(), Some(2));
}

#[test]
fn outputs_are_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"model": {"lambda": 100, "interaction": {"1": 1}}, "geometry": {"ell": 4}}"#);
    for w in ["1", "3"] {
        let out = mpal(&["emsa", "--config", &cfg, "--trials", "3", "--workers", w, "--out", w], dir.path());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for name in ["emsa.csv", "emsa_summary.csv", "emsa/N1_lambda0/seed_00002.json"] {
        let a = std::fs::read(dir.path().join("1").join(name)).unwrap();
        let b = std::fs::read(dir.path().join("3").join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn replay_reproduces_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"model": {"lambda": 100}, "geometry": {"ell": 4}}"#);
    let out = mpal(&["emsa", "--config", &cfg, "--trials", "2", "--seed", "8", "--out", "a"], dir.path());
    assert!(out.status.success());
    let report = "a/emsa/N1_lambda0/seed_00001.json";
    let out = mpal(&["emsa", "--config", &cfg, "--replay", report, "--out", "b"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    // A tampered report no longer matches: diagnostic exit.
    let text = std::fs::read_to_string(dir.path().join(report)).unwrap();
    let tampered = text.replacen("\"cover_cubes\": 9", "\"cover_cubes\": 8", 1);
    assert_ne!(tampered, text);
    std::fs::write(dir.path().join("t.json"), tampered).unwrap();
    let out = mpal(&["emsa", "--config", &cfg, "--replay", "t.json", "--out", "c"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn schedule_and_geometry_run_without_config() {
    let dir = tempfile::tempdir().unwrap();
    assert!(mpal(&["schedule", "--out", "s"], dir.path()).status.success());
    assert!(dir.path().join("s/schedule.json").exists());
    assert!(mpal(&["geometry", "--out", "g"], dir.path()).status.success());
    let text = std::fs::read_to_string(dir.path().join("g/geometry.csv")).unwrap();
    assert!(text.lines().nth(1).unwrap().contains(",true,"));
}
