use std::process::{Command, Output};

use serde_json::Value;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anticommute"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let out = cli(args);
    let value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "{e}: {}{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    });
    (value, out.status.code().unwrap())
}

fn check_names(report: &Value) -> Vec<String> {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["check"].as_str().unwrap().to_string())
        .collect()
}

#[test]
fn verify_algebra_passes() {
    let (report, code) = json(&["verify", "algebra"]);
    assert_eq!(code, 0);
    assert_eq!(report["passed"], true);
    assert_eq!(report["tolerance"], 1e-10);
}

#[test]
fn verify_wiener_includes_semigroup() {
    let (report, code) = json(&["verify", "wiener"]);
    assert_eq!(code, 0);
    assert!(check_names(&report)
        .iter()
        .any(|c| c.contains("p(0.3) * p(0.7) = p(1.0)")));
}

#[test]
fn verify_fk_includes_oscillator_at_unit_time() {
    let (report, code) = json(&["verify", "fk"]);
    assert_eq!(code, 0, "{report:#}");
    assert!(check_names(&report).contains(&"oscillator closed-form kernel vs oracle at t=1".to_string()));
}

#[test]
fn verify_csv_lists_every_check() {
    let out = cli(&["verify", "ito", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("suite,check,value,bound,pass"));
    assert!(lines.all(|l| l.starts_with("ito,") && l.ends_with(",true")));
}

#[test]
fn impossible_tolerance_fails() {
    let (report, code) = json(&["verify", "algebra", "--tol", "1e-300"]);
    assert_eq!(code, 1);
    assert_eq!(report["passed"], false);
}

#[test]
fn ou_kernel_matches_closed_form() {
    let (report, code) = json(&["kernel", "ou", "--r", "1", "--c", "1", "--t", "1", "--n", "64"]);
    assert_eq!(code, 0);
    assert!(
        report["max_abs_error_closed_form_vs_oracle"]["max_abs_diff"]
            .as_f64()
            .unwrap()
            < 1e-9
    );
    assert_eq!(report["runs"][0]["N"], 64);
    assert!(report["runs"][0]["max_abs_error"].as_f64().unwrap() < 5e-3);
}

#[test]
fn flat_kernel_is_exact_in_one_step() {
    let (report, code) = json(&["kernel", "flat", "--t", "1", "--n", "1"]);
    assert_eq!(code, 0);
    assert_eq!(report["runs"][0]["max_abs_error"], 0.0);
    assert_eq!(report["runs"][0]["max_abs_error_vs_closed_form"], 0.0);
}

#[test]
fn oscillator_kernel_error_halves() {
    let (report, code) = json(&["kernel", "oscillator", "--t", "1", "--n", "8,16,32,64"]);
    assert_eq!(code, 0);
    for r in report["error_ratios"].as_array().unwrap() {
        assert!((r.as_f64().unwrap() - 2.0).abs() < 0.1);
    }
}

#[test]
fn quartic_closed_form_mismatch_sets_exit_status() {
    let (report, code) = json(&["kernel", "quartic", "--n", "8"]);
    assert_eq!(code, 1);
    assert_eq!(
        report["max_abs_error_closed_form_vs_oracle"]["worst_monomial"],
        "η[1]η[2]"
    );
}

fn csv_rows(args: &[&str]) -> Vec<Vec<String>> {
    let out = cli(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect()
}

#[test]
fn converge_ou_extrapolates() {
    let rows = csv_rows(&["converge", "ou-moment"]);
    let last = rows.last().unwrap();
    assert_eq!(last[0], "richardson");
    let v: f64 = last[3].parse().unwrap();
    assert!((v - 0.43233).abs() < 2e-3);
}

#[test]
fn converge_flat_is_constant() {
    let rows = csv_rows(&["converge", "flat-moment", "--n", "2,4,8"]);
    assert_eq!(rows.len(), 4);
    assert!(rows.windows(2).all(|w| w[0][3] == w[1][3]));
}

#[test]
fn converge_oscillator_constant_tends_to_sinh() {
    let rows = csv_rows(&["converge", "oscillator-constant"]);
    let finest: f64 = rows[rows.len() - 2][3].parse().unwrap();
    assert!((finest - 1f64.sinh()).abs() < 1e-4);
}

#[test]
fn moments_table() {
    let rows = csv_rows(&["moments", "--m", "2", "--times", "0.5,1", "--degree", "2"]);
    assert_eq!(rows.len(), 6);
    let pair = rows.iter().find(|r| r[0] == "1.0" && r[1] == "β[1]β[2]").unwrap();
    assert_eq!(pair[2].parse::<f64>().unwrap().abs(), 1.0);
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_anticommute"))
            .args(["kernel", "oscillator", "--n", "4,8,16"])
            .env("ANTICOMMUTE_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    let one = run("1");
    assert_eq!(one, run("4"));
    assert_eq!(one, run("4"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    let out = dir.path().join("report.json");
    std::fs::write(
        &config,
        r#"{"hamiltonian": "ou", "t": 0.5, "n": [16, 32], "r": 2.0, "format": "csv"}"#,
    )
    .unwrap();
    let status = cli(&[
        "kernel",
        "--config",
        config.to_str().unwrap(),
        "--t",
        "1",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    assert!(status.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["t"], 1.0);
    assert_eq!(report["N"], serde_json::json!([16, 32]));
    assert_eq!(report["closed_form"]["r"], 2.0);
}

#[test]
fn bad_input_exits_with_two() {
    assert_eq!(cli(&["kernel", "ou", "--n", "8,4"]).status.code(), Some(2));
    assert_eq!(cli(&["kernel", "ou", "--t", "-1"]).status.code(), Some(2));
    assert_eq!(cli(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(cli(&["kernel"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    std::fs::write(&config, r#"{"unknown": 1}"#).unwrap();
    assert_eq!(
        cli(&["verify", "--config", config.to_str().unwrap()]).status.code(),
        Some(2)
    );
}
