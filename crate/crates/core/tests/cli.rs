//! End-to-end runs of the `colombeau` binary.

use std::process::Command;

fn colombeau(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_colombeau")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn gallery_list_names_every_item() {
    let (code, stdout) = colombeau(&["gallery", "list"]);
    assert_eq!(code, 0);
    for name in ["delta_radial_2d", "bump_asym_2d", "xi_12_rotation", "log_eps_dx_1d"] {
        assert!(stdout.contains(name), "{name} missing");
    }
}

#[test]
fn classify_reports_and_checks_expectations() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, stdout) = colombeau(&["classify", "--item", "delta_radial_1d", "--box", "-1,1", "--expect", "Moderate(1)", "--out", out]);
    assert_eq!(code, 0, "{stdout}");
    assert!(dir.path().join("task_00_classify.json").exists());
    let (code, _) = colombeau(&["classify", "--item", "delta_radial_1d", "--box", "-1,1", "--expect", "Bounded", "--out", out]);
    assert_eq!(code, 1);
    let (code, _) = colombeau(&["classify", "--expr", "eps^-2 * x1 +", "--box", "-1,1", "--out", out]);
    assert_eq!(code, 2);
}

#[test]
fn flow_and_invariance_subcommands_pass_on_the_rotation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, stdout) = colombeau(&[
        "flow", "--field", "xi_12_rotation", "--x0", "1,0", "--t", "-2,2", "--group-law", "0.7,0.5", "--out", out,
    ]);
    assert_eq!(code, 0, "{stdout}");
    let (code, _) = colombeau(&[
        "invariance", "--item", "norm_sq_2d", "--method", "infinitesimal", "--field", "xi_12_rotation", "--out", out,
    ]);
    assert_eq!(code, 0);
    let (code, _) = colombeau(&[
        "invariance", "--item", "bump_asym_2d", "--method", "standard-rotations", "--angles", "1.5707963267948966", "--out", out,
    ]);
    assert_eq!(code, 1);
}

#[test]
fn reduce_writes_residual_and_profile() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = colombeau(&["reduce", "--item", "norm_quartic_2d", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    let profile = std::fs::read_to_string(dir.path().join("task_00_reduce_profile.csv")).unwrap();
    assert!(profile.starts_with("r,value\n"));
}

#[test]
fn run_rejects_unknown_schema_versions() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    std::fs::write(&path, r#"{"schema_version": 2, "items": [], "tasks": []}"#).unwrap();
    let (code, _) = colombeau(&["run", path.to_str().unwrap()]);
    assert_eq!(code, 2);
}
