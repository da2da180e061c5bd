//! Black-box tests of the `kofn` binary: flag validation, output schemas,
//! exit codes, and determinism.

use std::process::{Command, Output};

fn kofn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kofn"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).unwrap()
}

#[test]
fn model_and_flag_mismatches_are_usage_errors() {
    let missing_mu = kofn(&["mtdl", "--n", "4", "--k", "2", "--lambda", "1", "--model", "exp"]);
    assert_eq!(missing_mu.status.code(), Some(2));
    assert!(stderr(&missing_mu).contains("--mu is required"));

    let stray_mu = kofn(&[
        "mtdl", "--n", "4", "--k", "2", "--lambda", "1", "--trep", "0.2", "--mu", "3",
    ]);
    assert_eq!(stray_mu.status.code(), Some(2));
    assert!(stderr(&stray_mu).contains("--mu only applies"));

    let stray_trep = kofn(&[
        "mtdl", "--n", "4", "--k", "2", "--lambda", "1", "--model", "exp", "--mu", "3",
        "--trep", "0.2",
    ]);
    assert_eq!(stray_trep.status.code(), Some(2));
    assert!(stderr(&stray_trep).contains("--trep does not apply"));

    let missing_trep = kofn(&["mtdl", "--n", "4", "--k", "2", "--lambda", "1"]);
    assert_eq!(missing_trep.status.code(), Some(2));
    assert!(stderr(&missing_trep).contains("--trep is required"));
}

#[test]
fn parameter_violations_are_usage_errors() {
    let bad_k = kofn(&["mtdl", "--n", "4", "--k", "4", "--lambda", "1", "--trep", "0.2"]);
    assert_eq!(bad_k.status.code(), Some(2));

    let one_trial = kofn(&[
        "simulate", "--n", "4", "--k", "2", "--lambda", "1", "--trep", "0.2", "--trials", "1",
    ]);
    assert_eq!(one_trial.status.code(), Some(2));
    assert!(stderr(&one_trial).contains("at least 2 trials"));

    let missing_n = kofn(&["mtdl", "--k", "2", "--lambda", "1", "--trep", "0.2"]);
    assert_eq!(missing_n.status.code(), Some(2));
}

#[test]
fn mtdl_reports_the_closed_form_pair() {
    let output = kofn(&[
        "mtdl", "--n", "2", "--k", "1", "--lambda", "1", "--trep", "0.6931471805599453",
        "--discipline", "serial",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let text = stdout(&output);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "discipline,model,n,k,lambda,trep,mu,exact,derivative,approx,unit"
    );
    let cells: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(cells[0], "serial");
    assert_eq!(cells[1], "det");
    assert_eq!(cells[6], "", "mu column must be empty for the deterministic model");
    let exact: f64 = cells[7].parse().unwrap();
    let derivative: f64 = cells[8].parse().unwrap();
    assert!((exact - 2.0).abs() < 1e-8);
    assert!((derivative - 2.0).abs() < 1e-8);
    assert_eq!(cells[10], "year");
}

#[test]
fn curve_output_is_a_valid_distribution() {
    let output = kofn(&[
        "curve", "--n", "4", "--k", "2", "--lambda", "1", "--trep", "0.2", "--tmax", "6",
        "--points", "21",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let text = stdout(&output);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,cdf,reliability");
    let rows: Vec<Vec<f64>> = lines
        .map(|line| line.split(',').map(|cell| cell.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 21);
    assert_eq!(rows[0][0], 0.0);
    assert_eq!(rows[0][1], 0.0);
    assert_eq!(rows[0][2], 1.0);
    assert_eq!(rows[20][0], 6.0);
    for pair in rows.windows(2) {
        assert!(pair[1][1] >= pair[0][1], "cdf must be nondecreasing");
    }
    for row in &rows {
        assert!((row[1] + row[2] - 1.0).abs() < 1e-8);
    }
}

#[test]
fn curve_rejects_running_both_disciplines() {
    let output = kofn(&[
        "curve", "--n", "4", "--k", "2", "--lambda", "1", "--trep", "0.2", "--tmax", "6",
        "--discipline", "both",
    ]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn json_reports_carry_their_parameters_and_records() {
    let output = kofn(&[
        "mtdl", "--n", "4", "--k", "2", "--lambda", "1", "--model", "exp", "--mu", "5",
        "--format", "json",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    let records = report["records"].as_array().unwrap();
    assert_eq!(records.len(), 2);
    assert_eq!(records[0]["discipline"], "serial");
    assert_eq!(records[1]["discipline"], "parallel");
    assert_eq!(records[0]["mu"], 5.0);
    assert!(records[0].get("trep").is_none());
    assert_eq!(records[0]["exact"], 3.3750000000000004);

    let sweep = kofn(&[
        "sweep", "--n", "4", "--k", "2", "--lambda", "1", "--trep-min", "0.01",
        "--trep-max", "1", "--sweep-points", "3", "--format", "json",
    ]);
    assert_eq!(sweep.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&sweep)).unwrap();
    assert_eq!(report["records"].as_array().unwrap().len(), 3);
    assert_eq!(report["n"], 4);
}

#[test]
fn reports_can_be_written_to_a_file() {
    let path = std::env::temp_dir().join("kofn_cli_behavior_report.csv");
    let to_file = kofn(&[
        "mtdl", "--n", "4", "--k", "2", "--lambda", "1", "--trep", "0.2",
        "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(to_file.status.code(), Some(0));
    assert!(stdout(&to_file).is_empty());
    let to_stdout = kofn(&["mtdl", "--n", "4", "--k", "2", "--lambda", "1", "--trep", "0.2"]);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout(&to_stdout));
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn simulate_output_is_deterministic_for_a_fixed_seed() {
    let args = [
        "simulate", "--n", "4", "--k", "2", "--lambda", "1", "--trep", "0.2",
        "--trials", "5000", "--seed", "7",
    ];
    let first = kofn(&args);
    let second = kofn(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let text = stdout(&first);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "discipline,model,n,k,lambda,trep,mu,trials,seed,mean,std_error,analytic,z,unit"
    );
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        let z: f64 = cells[12].parse().unwrap();
        assert!(z.abs() < 6.0, "simulation drifted {z} standard errors from the mean");
    }
}

#[test]
fn validate_passes_by_default_and_catches_an_injected_fault() {
    let clean = kofn(&["validate"]);
    assert_eq!(clean.status.code(), Some(0));
    let text = stdout(&clean);
    assert!(text.contains("PASS normalization"));
    assert!(text.contains("all 9 checks passed"));
    assert!(!text.contains("FAIL"));

    let faulty = kofn(&["validate", "--inject-fault"]);
    assert_eq!(faulty.status.code(), Some(1));
    assert!(stdout(&faulty).contains("FAIL evaluation-method agreement"));

    let with_array = kofn(&["validate", "--n", "7", "--k", "4", "--lambda", "2", "--trep", "0.3"]);
    assert_eq!(with_array.status.code(), Some(0));
}
