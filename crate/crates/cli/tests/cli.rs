//! Binary-level checks: exit codes, JSON validity, determinism.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_polyatlas"))
}

fn systems_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../systems")
}

#[test]
fn analyze_reports_five_singularities_and_conditions() {
    let out = bin()
        .arg("analyze")
        .arg(systems_dir().join("lorenz.sys"))
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("accessible singularities: 5"), "{text}");
    assert!(text.contains("condition 1: epsilon*(b - 1)*(b - 2*sigma)*(b + 3*sigma - 1)"));
    assert!(text.contains("family: sigma = 2, epsilon = 0, b = 1"));
}

#[test]
fn parse_error_exits_with_code_one() {
    let dir = std::env::temp_dir().join("polyatlas-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let empty = dir.join("empty.sys");
    std::fs::write(&empty, "").unwrap();
    let out = bin().arg("analyze").arg(&empty).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("missing `system` line"), "{err}");
}

#[test]
fn json_output_is_valid_and_deterministic() {
    let run = || {
        let out = bin()
            .arg("analyze")
            .arg(systems_dir().join("lorenz.sys"))
            .args(["--skip-numeric", "--json", "-", "--seed", "7"])
            .output()
            .unwrap();
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    let a = run();
    let b = run();
    assert_eq!(a, b, "identical inputs and seed must give identical output");
    let json_start = a.find("{").unwrap();
    let v: serde_json::Value = serde_json::from_str(&a[json_start..]).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["singularities"].as_array().unwrap().len(), 5);
}

#[test]
fn index_command_prints_the_table_row() {
    let out = bin()
        .arg("index")
        .arg(systems_dir().join("lorenz.sys"))
        .args(["--chart", "U1", "--point", "0,0,0"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("(0, 1*i, -1*i)"), "{text}");
}

#[test]
fn strict_mode_flags_failures() {
    // A deliberately wrong integral declaration fails under --strict.
    let dir = std::env::temp_dir().join("polyatlas-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad_integral.sys");
    std::fs::write(
        &bad,
        "system s\nvars x y z\ndx/dt = y\ndy/dt = -x*z + x\ndz/dt = x*y\nintegral I = x^2 + 2*z\n",
    )
    .unwrap();
    let out = bin()
        .arg("verify-integrals")
        .arg(&bad)
        .arg("--strict")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let ok = bin().arg("verify-integrals").arg(&bad).output().unwrap();
    assert_eq!(ok.status.code(), Some(0), "non-strict runs report, not fail");
}

#[test]
fn trajectory_csv_export() {
    let dir = std::env::temp_dir().join("polyatlas-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("traj.csv");
    let out = bin()
        .arg("numeric")
        .arg(systems_dir().join("system31.sys"))
        .args(["--x0", "1,0,0", "--t", "1", "--step", "0.1"])
        .arg("--traj")
        .arg(&csv)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,re_x,im_x,re_y,im_y,re_z,im_z");
    assert_eq!(lines.count(), 11);
}

#[test]
fn numeric_drift_within_tolerance() {
    let out = bin()
        .arg("numeric")
        .arg(systems_dir().join("system31.sys"))
        .args(["--x0", "1,0,0", "--t", "10", "--step", "1e-3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let drift_line = text.lines().find(|l| l.contains("max drift")).unwrap();
    let value: f64 = drift_line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(value <= 1e-8, "{drift_line}");
}
