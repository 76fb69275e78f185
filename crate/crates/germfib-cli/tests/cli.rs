//! End-to-end tests that drive the `germfib` binary as a subprocess.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_germfib");

const QUICK_CONFIG: &str = "samples = 60\nrungs = 2\nequivalence_points = 2\n";

fn germfib(args: &[&str], dir: &Path) -> Output {
    Command::new(BIN)
        .args(args)
        .current_dir(dir)
        .env_remove("GERMFIB_SEED")
        .output()
        .expect("failed to spawn germfib")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn write_quick_config(dir: &Path) {
    std::fs::write(dir.join("quick.cfg"), QUICK_CONFIG).unwrap();
}

#[test]
fn catalog_lists_builtin_germs() {
    let tmp = TempDir::new().unwrap();
    let out = germfib(&["catalog"], tmp.path());
    assert!(out.status.success());
    let text = stdout(&out);
    for name in ["xy_z2", "ex31_n3", "ex31_n4", "polar_z1z2bar"] {
        assert!(text.contains(name), "catalog output missing {}:\n{}", name, text);
    }
}

#[test]
fn analyze_writes_bundle_and_reports_verdicts() {
    let tmp = TempDir::new().unwrap();
    write_quick_config(tmp.path());
    let out = germfib(
        &["analyze", "xy_z2", "--out", "bundle", "--config", "quick.cfg", "--seed", "7"],
        tmp.path(),
    );
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("nice"), "{}", text);
    assert!(text.contains("equivalence_evidence"), "{}", text);
    assert!(!text.contains("Fail"), "unexpected failure verdict:\n{}", text);

    let bundle = tmp.path().join("bundle");
    for file in ["reports.json", "discriminant.json", "metadata.json", "milnor_rung0.csv"] {
        assert!(bundle.join(file).is_file(), "missing {}", file);
    }
    let csv = std::fs::read_to_string(bundle.join("milnor_rung0.csv")).unwrap();
    assert!(csv.starts_with("x1,x2,x3,residual,radius,component,excluded"), "{}", csv);
}

#[test]
fn check_prints_single_report_json() {
    let tmp = TempDir::new().unwrap();
    write_quick_config(tmp.path());
    let out = germfib(
        &["check", "nice", "xy_z2", "--config", "quick.cfg"],
        tmp.path(),
    );
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["condition"], "nice");
    assert_eq!(v["verdict"], "pass");
    assert!(v.get("evidence").is_some());
    assert!(v.get("tolerances").is_some());
}

#[test]
fn check_rejects_unknown_condition() {
    let tmp = TempDir::new().unwrap();
    let out = germfib(&["check", "frobnicated", "xy_z2"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown condition"));
}

#[test]
fn malformed_germ_file_is_an_input_error() {
    let tmp = TempDir::new().unwrap();
    std::fs::write(tmp.path().join("bad.gm"), "vars: x y\nG1 = x +\n").unwrap();
    let out = germfib(&["weights", "bad.gm"], tmp.path());
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));

    let out = germfib(&["weights", "no_such_file.gm"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn germ_file_roundtrip_through_weights() {
    let tmp = TempDir::new().unwrap();
    std::fs::write(
        tmp.path().join("pair.gm"),
        "vars: x y z\nG1 = x*y\nG2 = z^2\n",
    )
    .unwrap();
    let out = germfib(&["weights", "pair.gm"], tmp.path());
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["radial"]["q"], serde_json::json!([1, 1, 1]));
    assert_eq!(v["radial"]["d"], 2);
    assert!(v["polar"].is_null());
}

#[test]
fn weights_reports_polar_for_mixed_germ() {
    let tmp = TempDir::new().unwrap();
    let out = germfib(&["weights", "polar_z1z2bar"], tmp.path());
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["polar"]["p_wts"], serde_json::json!([2, 1]));
    assert_eq!(v["polar"]["k"], 1);
}

#[test]
fn fiber_csv_and_ply_output() {
    let tmp = TempDir::new().unwrap();
    let out = germfib(
        &["fiber", "xy_z2", "--kind", "tube", "--y", "0.6,0.8", "-n", "40", "--out", "fiber.csv"],
        tmp.path(),
    );
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let csv = std::fs::read_to_string(tmp.path().join("fiber.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x1,x2,x3,residual"));
    assert!(lines.count() > 0, "no fiber points in CSV");

    let out = germfib(
        &["fiber", "xy_z2", "--kind", "sphere", "--y", "0.6,0.8", "-n", "40",
          "--format", "ply", "--out", "fiber.ply"],
        tmp.path(),
    );
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let ply = std::fs::read_to_string(tmp.path().join("fiber.ply")).unwrap();
    assert!(ply.starts_with("ply\nformat ascii 1.0\n"), "{}", ply);
}

#[test]
fn ply_rejected_when_source_is_not_three_dimensional() {
    let tmp = TempDir::new().unwrap();
    let out = germfib(
        &["export", "ex31_n4", "--what", "milnor-set", "--format", "ply"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("PLY"), "{}", stderr(&out));
}

#[test]
fn blowaway_writes_trajectories() {
    let tmp = TempDir::new().unwrap();
    let out = germfib(
        &["blowaway", "xy_z2", "--y", "0.6,0.8", "-n", "3", "--out", "traj"],
        tmp.path(),
    );
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("ReachedSphere"));
    let csv = std::fs::read_to_string(tmp.path().join("traj/trajectory0.csv")).unwrap();
    assert!(csv.starts_with("t,x1,x2,x3,rho,gnorm2,psi_1,psi_2"), "{}", csv);
}

#[test]
fn seed_env_var_is_a_fallback_for_the_flag() {
    let tmp = TempDir::new().unwrap();
    let run = |envseed: Option<&str>, flag: Option<&str>| -> String {
        let mut cmd = Command::new(BIN);
        cmd.args(["fiber", "xy_z2", "--kind", "tube", "--y", "0.6,0.8", "-n", "20"])
            .current_dir(tmp.path())
            .env_remove("GERMFIB_SEED");
        if let Some(s) = envseed {
            cmd.env("GERMFIB_SEED", s);
        }
        if let Some(s) = flag {
            cmd.args(["--seed", s]);
        }
        let out = cmd.output().unwrap();
        assert!(out.status.success(), "stderr: {}", stderr(&out));
        stdout(&out)
    };
    let by_env = run(Some("5"), None);
    let by_flag = run(None, Some("5"));
    let other = run(None, Some("6"));
    assert_eq!(by_env, by_flag);
    assert_ne!(by_env, other);

    let out = Command::new(BIN)
        .args(["fiber", "xy_z2", "--kind", "tube", "--y", "0.6,0.8"])
        .current_dir(tmp.path())
        .env("GERMFIB_SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn analyze_is_reproducible() {
    let tmp = TempDir::new().unwrap();
    write_quick_config(tmp.path());
    let args = ["analyze", "xy_z2", "--config", "quick.cfg", "--seed", "9"];
    let a = germfib(&[&args[..], &["--out", "a"]].concat(), tmp.path());
    let b = germfib(&[&args[..], &["--out", "b"]].concat(), tmp.path());
    assert!(a.status.success() && b.status.success());
    for file in ["reports.json", "discriminant.json", "milnor_rung0.csv", "milnor_rung1.csv"] {
        let fa = std::fs::read(tmp.path().join("a").join(file)).unwrap();
        let fb = std::fs::read(tmp.path().join("b").join(file)).unwrap();
        assert_eq!(fa, fb, "{} differs between runs", file);
    }
}
