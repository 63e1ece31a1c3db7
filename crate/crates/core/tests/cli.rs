//! The `swssb` binary end to end: exit codes and the files a run leaves behind.

use std::process::Command;

fn swssb() -> Command {
    Command::new(env!("CARGO_BIN_EXE_swssb"))
}

#[test]
fn verify_appendix_passes() {
    let out = swssb().args(["verify-appendix", "D"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().all(|l| l.contains("PASS")));
}

#[test]
fn verify_appendix_json() {
    let out = swssb().args(["verify-appendix", "subsystem", "--json"]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["checks"].as_array().is_some_and(|c| !c.is_empty()));
}

#[test]
fn run_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("jw.toml");
    std::fs::write(&cfg, "experiment = \"jw_check\"\nL = [3, 4]\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = swssb().arg("run").arg(&cfg).arg("--out").arg(&out_dir).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("C10 PASS"));
    for f in ["config.toml", "results.csv", "trace_distance.csv", "parity_commutator.csv", "report.json"] {
        assert!(out_dir.join(f).exists(), "{f} missing");
    }
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["verdicts"][0]["criterion"], "C10");
}

#[test]
fn bad_config_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "experiment = \"jw_check\"\nL = [4]\ng = [0.5]\n").unwrap();
    let out = swssb().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`g`"));
}

#[test]
fn failing_verdict_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("overlap.toml");
    // With no X deformation the 3 → 4 ratio falls just short of 2.
    std::fs::write(&cfg, "experiment = \"overlap_check\"\nlx = 3\nly = [2, 3, 4]\ng_x = 0.0\ng_z = 0.3\n").unwrap();
    let out = swssb().arg("run").arg(&cfg).arg("--out").arg(dir.path().join("o")).output().unwrap();
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn unknown_preset() {
    let out = swssb().args(["preset", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
