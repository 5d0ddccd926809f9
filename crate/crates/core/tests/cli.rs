//! End-to-end checks of the command-line interface: artifacts, the flat
//! config file, and the exit-code contract (0 ok, 2 parameter, 3
//! divergence).

use std::process::Command;

fn grough() -> Command {
    Command::new(env!("CARGO_BIN_EXE_grough"))
}

#[test]
fn help_succeeds() {
    let out = grough().arg("--help").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in [
        "simulate",
        "lift-distance",
        "wong-zakai",
        "rde-vs-sde",
        "expectation",
        "rough-integral-rate",
    ] {
        assert!(text.contains(sub), "help misses {sub}");
    }
}

#[test]
fn simulate_writes_sample_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("sample.csv");
    let status = grough()
        .args([
            "simulate",
            "--n-fine",
            "64",
            "--sigma-lo",
            "0.5",
            "--sigma-hi",
            "1.0",
            "--scenarios",
            "bang_bang_random",
            "--seed-base",
            "9",
            "--out",
        ])
        .arg(&out_path)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# grough "));
    assert_eq!(lines.next().unwrap(), "t,a,B,qv");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 65);
    let first: Vec<f64> = rows[0].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first[0], 0.0);
    assert_eq!(first[2], 0.0);
    assert_eq!(first[3], 0.0);
}

#[test]
fn wong_zakai_emits_csv_json_and_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("wz.csv");
    let status = grough()
        .args([
            "wong-zakai",
            "--n-fine",
            "256",
            "--ladder",
            "8,16,32,64",
            "--seeds",
            "3",
            "--scenarios",
            "constant_hi",
            "--coeffs",
            "sin",
            "--x0",
            "1.0",
            "--seed-base",
            "4",
            "--plot-data",
            "--out",
        ])
        .arg(&out_path)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(&out_path).unwrap();
    assert!(csv.starts_with("# grough "));
    assert!(csv.contains("experiment,scenario,seed,n,metric,value"));
    assert!(csv.contains("sq_terminal_error"));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("wz.json")).unwrap())
            .unwrap();
    assert_eq!(json["experiment"], "wong_zakai");
    assert!(json["summaries"].as_array().unwrap().len() >= 2);
    assert!(dir
        .path()
        .join("wz_sup_t_max_scenario_mean.dat")
        .exists());
}

#[test]
fn config_file_drives_a_run_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.cfg");
    std::fs::write(
        &cfg_path,
        "n_fine = 256\nladder = 8,16,32,64\nseeds = 2\nscenarios = constant_hi\ncoeffs = sin\nseed_base = 12\n",
    )
    .unwrap();
    let out_path = dir.path().join("lift.csv");
    let status = grough()
        .args(["lift-distance", "--config"])
        .arg(&cfg_path)
        .args(["--seeds", "3", "--out"])
        .arg(&out_path)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(&out_path).unwrap();
    // 3 seeds (flag wins over the file's 2) x 4 ladder x 3 metrics
    let data_rows = csv.lines().skip(2).count();
    assert_eq!(data_rows, 36);
}

#[test]
fn expectation_reports_estimates() {
    let out = grough()
        .args([
            "expectation",
            "--n-fine",
            "64",
            "--paths",
            "500",
            "--payoffs",
            "x2,neg_x2",
            "--scenarios",
            "constant_lo,constant_hi",
            "--seed-base",
            "3",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let estimates = json["estimates"].as_array().unwrap();
    assert_eq!(estimates.len(), 2);
    assert_eq!(estimates[0]["payoff"], "x2");
    assert_eq!(estimates[0]["exact"], 1.0);
    assert!(estimates[0]["report"]["estimator"].is_number());
}

#[test]
fn parameter_errors_exit_with_2() {
    for args in [
        vec!["wong-zakai", "--scenarios", "nonsense"],
        vec!["wong-zakai", "--n-fine", "256", "--ladder", "7,14,28,56"],
        vec!["lift-distance", "--alpha", "0.6"],
        vec!["rde-vs-sde", "--coeffs", "bogus"],
    ] {
        let out = grough().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "args {args:?}");
    }
}

#[test]
fn divergence_exits_with_3() {
    let out = grough()
        .args([
            "wong-zakai",
            "--n-fine",
            "256",
            "--ladder",
            "8,16,32,64",
            "--seeds",
            "1",
            "--scenarios",
            "constant_hi",
            "--coeffs",
            "linear",
            "--x0",
            "1e7",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("diverged"));
}
