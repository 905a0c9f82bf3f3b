use std::path::Path;
use std::process::{Command, Output};

use osphg::report::Summary;

fn osphg(args: &[&str], out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_osphg"));
    cmd.args(args);
    if let Some(out) = out {
        cmd.arg("--out").arg(out);
    }
    cmd.output().expect("spawn osphg")
}

fn ok(output: Output) -> String {
    assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));
    String::from_utf8(output.stdout).unwrap()
}

#[test]
fn run_writes_identical_bytes_for_identical_arguments() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["run", "--T", "100", "--W", "10", "--seed", "7"];
    ok(osphg(&args, Some(&dir.path().join("a"))));
    ok(osphg(&args, Some(&dir.path().join("b"))));
    let read = |d: &str, f: &str| std::fs::read(dir.path().join(d).join(f)).unwrap();
    assert_eq!(read("a", "run.csv"), read("b", "run.csv"));
    let csv = String::from_utf8(read("a", "run.csv")).unwrap();
    assert!(csv.starts_with("t,lambda,f_xt,g_xt,spend,run_avg_f,run_avg_g\n"));
    assert_eq!(csv.lines().count(), 101);

    ok(osphg(&["benchmark", "--T", "100", "--seed", "7", "--windows", "1,10,100"], Some(&dir.path().join("a"))));
    ok(osphg(&["benchmark", "--T", "100", "--seed", "7", "--windows", "1,10,100"], Some(&dir.path().join("b"))));
    assert_eq!(read("a", "benchmark.csv"), read("b", "benchmark.csv"));
    let bench = String::from_utf8(read("a", "benchmark.csv")).unwrap();
    assert!(bench.starts_with("W,utility,xstar_1,xstar_2\n"));
    assert_eq!(bench.lines().count(), 4);
}

#[test]
fn summary_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    ok(osphg(&["run", "--T", "150", "--seed", "3", "--K", "7", "--beta", "9.5"], Some(&first)));
    let again = dir.path().join("again");
    let summary = first.join("summary.txt");
    ok(osphg(&["run", "--config", summary.to_str().unwrap()], Some(&again)));
    assert_eq!(std::fs::read(first.join("run.csv")).unwrap(), std::fs::read(again.join("run.csv")).unwrap());
    let parsed = Summary::load(&summary).unwrap();
    assert_eq!(parsed.get("param.K"), Some("7"));
    assert_eq!(parsed.get("const.beta"), Some("9.5"));
}

#[test]
fn frozen_dual_overspends() {
    let dir = tempfile::tempdir().unwrap();
    ok(osphg(&["run", "--T", "2000", "--lambda-frozen"], Some(dir.path())));
    let summary = Summary::load(&dir.path().join("summary.txt")).unwrap();
    assert!(summary.require_f64("result.final_run_avg_g").unwrap() > 0.0);
    assert_eq!(summary.require_f64("result.final_lambda").unwrap(), 0.0);
}

#[test]
fn default_run_validates() {
    let dir = tempfile::tempdir().unwrap();
    ok(osphg(&["run"], Some(dir.path())));
    ok(osphg(&["benchmark"], Some(dir.path())));
    let summary = Summary::load(&dir.path().join("summary.txt")).unwrap();
    assert_eq!(summary.require_usize("param.T").unwrap(), 10_000);
    assert_eq!(summary.require_usize("param.K").unwrap(), 100);
    assert_eq!(summary.require_usize("param.W").unwrap(), 100);
    assert!(summary.require_f64("result.final_run_avg_g").unwrap() < 0.0);
    let report = ok(osphg(&["validate", dir.path().to_str().unwrap()], None));
    assert_eq!(report.lines().count(), 5, "{report}");
    assert!(report.lines().all(|l| l.starts_with("PASS")), "{report}");
}

#[test]
fn tampered_log_fails_with_its_row() {
    let dir = tempfile::tempdir().unwrap();
    ok(osphg(&["run", "--T", "200"], Some(dir.path())));
    ok(osphg(&["benchmark", "--T", "200"], Some(dir.path())));
    let path = dir.path().join("run.csv");
    let text = std::fs::read_to_string(&path).unwrap();
    let tampered: Vec<String> = text
        .lines()
        .map(|line| match line.split(',').collect::<Vec<_>>().as_slice() {
            ["50", lambda, _, rest @ ..] => format!("50,{lambda},0.999,{}", rest.join(",")),
            _ => line.to_string(),
        })
        .collect();
    std::fs::write(&path, tampered.join("\n") + "\n").unwrap();
    let output = osphg(&["validate", dir.path().to_str().unwrap()], None);
    assert_eq!(output.status.code(), Some(2));
    let report = String::from_utf8(output.stdout).unwrap();
    assert!(report.contains("FAIL") && report.contains("row 50"), "{report}");
}

#[test]
fn short_horizon_skips_the_master_inequality() {
    let dir = tempfile::tempdir().unwrap();
    ok(osphg(&["run", "--T", "20", "--W", "1"], Some(dir.path())));
    ok(osphg(&["benchmark", "--T", "20", "--W", "1"], Some(dir.path())));
    let report = ok(osphg(&["validate", dir.path().to_str().unwrap()], None));
    assert!(report.contains("precondition unmet; skipped"), "{report}");
}

#[test]
fn validate_requires_all_files() {
    let dir = tempfile::tempdir().unwrap();
    ok(osphg(&["run", "--T", "50"], Some(dir.path())));
    let output = osphg(&["validate", dir.path().to_str().unwrap()], None);
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("benchmark.csv"));
}

#[test]
fn sweep_writes_rows_and_slopes() {
    let dir = tempfile::tempdir().unwrap();
    ok(osphg(&["sweep", "--horizons", "100,200,400", "--replicates", "2"], Some(dir.path())));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("T,W,K,R_T,C_T,slack41,slackMaster"));
    let rows: Vec<&str> = lines.clone().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 6);
    assert!(rows[0].starts_with("100,10,"));
    assert!(csv.contains("# slope_R=") && csv.contains("# slope_C="));

    let output = osphg(&["sweep", "--horizons", "100"], Some(dir.path()));
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("need ≥ 3 horizons"));
}

#[test]
fn check_function_verdicts() {
    let good = ok(osphg(&["check-function", "--hessian=-1,0;0,-1", "--linear=1,1"], None));
    assert!(good.contains("DR-submodular: yes") && good.contains("monotone: yes"), "{good}");

    let bad = osphg(&["check-function", "--hessian=-1,0.5;0.5,-1", "--linear=1,1"], None);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("DR-submodular: NO"));

    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("f.txt");
    std::fs::write(&table, "0 0\n1 1\n2 1\n3 1.5\n").unwrap();
    ok(osphg(&["check-function", "--set-function", table.to_str().unwrap()], None));
    std::fs::write(&table, "0 0\n1 1\n2 1\n3 3\n").unwrap();
    let bad = osphg(&["check-function", "--set-function", table.to_str().unwrap()], None);
    assert!(!bad.status.success());

    ok(osphg(&["check-function", "--random", "3", "--seed", "4"], None));
}

#[test]
fn bad_configuration_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.txt");
    std::fs::write(&config, "T=100\nwindow_size=3\n").unwrap();
    let output = osphg(&["run", "--config", config.to_str().unwrap()], Some(dir.path()));
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("window_size"));
    let output = osphg(&["run", "--T", "10", "--W", "11"], Some(dir.path()));
    assert!(!output.status.success());
}
