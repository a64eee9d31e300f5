//! End-to-end runs of the `warpspec` binary: exit codes, report files, and
//! byte-identical reruns.

use std::path::Path;
use std::process::{Command, Output};

fn warpspec(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_warpspec"))
        .args(args)
        .arg("--out")
        .arg(out_dir)
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn check_writes_reports_and_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let output = warpspec(&["check"], dir.path());
    assert!(output.status.success(), "{output:?}");

    let verdict = read(dir.path(), "verdict.txt");
    assert!(verdict.starts_with("PASS"), "{verdict}");
    assert!(verdict.ends_with('\n'));
    // stdout carries the same verdict line.
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert_eq!(stdout.trim_end(), verdict.trim_end());

    let conditions = read(dir.path(), "conditions.csv");
    assert!(conditions.starts_with("condition,window_lo,window_hi,pass,worst_margin,argmin_r\n"));
    let fitted = read(dir.path(), "fitted.csv");
    assert!(fitted.starts_with("a,b,a0,b0,b1,k3,gamma\n"));
}

#[test]
fn thresholds_csv_schema() {
    let dir = tempfile::tempdir().unwrap();
    let output = warpspec(&["thresholds", "--set", "constants.theta=1.0"], dir.path());
    assert!(output.status.success(), "{output:?}");
    let csv = read(dir.path(), "thresholds.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "lambda1,y1,beta,star8,eta1");
    let row = lines.next().unwrap();
    assert_eq!(row.split(',').count(), 5);
    // Every cell parses back as a finite number.
    for cell in row.split(',') {
        assert!(cell.parse::<f64>().unwrap().is_finite(), "cell {cell}");
    }
}

#[test]
fn unknown_config_key_is_a_hard_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    std::fs::write(&config, "scan.lambda_lo = 0.5\nnosuch.key = 1\n").unwrap();
    let output = warpspec(
        &["scan", "--config", config.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(2), "{output:?}");
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("nosuch.key"), "{stderr}");
    assert!(!dir.path().join("verdict.txt").exists());
}

#[test]
fn bad_set_value_is_a_hard_error() {
    let dir = tempfile::tempdir().unwrap();
    let output = warpspec(&["scan", "--set", "end.n=banana"], dir.path());
    assert_eq!(output.status.code(), Some(2), "{output:?}");
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("end.n"), "{stderr}");
}

#[test]
fn identity_closed_form_passes() {
    let dir = tempfile::tempdir().unwrap();
    // h = r, n = 2, beta = 0, v = 1/r: both sides equal 1/t - 1/s.
    let output = warpspec(
        &[
            "identity",
            "--set",
            "end.n=2",
            "--set",
            "identity.beta=0",
            "--set",
            "identity.s=1",
            "--set",
            "identity.t=2",
        ],
        dir.path(),
    );
    assert!(output.status.success(), "{output:?}");
    let csv = read(dir.path(), "identity.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "check,beta,s,t,lhs,rhs,residual");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "configured");
    let lhs: f64 = row[4].parse().unwrap();
    assert!((lhs + 0.5).abs() < 1e-10, "lhs = {lhs}");
}

#[test]
fn identity_draws_fail_against_a_loose_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let output = warpspec(
        &[
            "identity",
            "--set",
            "identity.draws=5",
            "--set",
            "tolerances.identity_residual=1e-18",
        ],
        dir.path(),
    );
    assert_eq!(output.status.code(), Some(1), "{output:?}");
    let verdict = read(dir.path(), "verdict.txt");
    assert!(verdict.starts_with("FAIL"), "{verdict}");
    // Six rows: the configured interval plus five draws.
    assert_eq!(read(dir.path(), "identity.csv").lines().count(), 7);
}

#[test]
fn scan_reruns_are_byte_identical() {
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    let args = ["scan", "--modes", "2", "--lambda-grid", "0.5:1.5:0.5"];
    let output = warpspec(&args, first.path());
    assert!(output.status.success(), "{output:?}");
    let rerun = warpspec(&args, second.path());
    assert!(rerun.status.success(), "{rerun:?}");

    for name in ["scan.csv", "potential.csv", "verdict.txt"] {
        assert_eq!(read(first.path(), name), read(second.path(), name), "{name} differs");
    }
    let scan = read(first.path(), "scan.csv");
    assert!(scan.starts_with("mode,lambda,classification,tail_mass_ratio,envelope_exponent,fit_r2\n"));
    assert_eq!(scan.lines().count(), 1 + 2 * 3);
    let verdict = read(first.path(), "verdict.txt");
    assert!(verdict.starts_with("OK: 6 rows"), "{verdict}");
}

#[test]
fn counterexample_narrow_grid_confirms_the_candidate() {
    let dir = tempfile::tempdir().unwrap();
    let output = warpspec(
        &[
            "counterexample",
            "--set",
            "end.n=2",
            "--lambda-grid",
            "0.8:1.2:0.1",
        ],
        dir.path(),
    );
    assert!(output.status.success(), "{output:?}");
    let verdict = read(dir.path(), "verdict.txt");
    assert!(verdict.starts_with("PASS"), "{verdict}");
    let report = read(dir.path(), "report.csv");
    for section in ["# properties", "# scan", "# candidates", "# fitted_constants", "# thresholds"] {
        assert!(report.contains(section), "missing {section}");
    }
}
