//! Contract tests of the command-line surface: exit codes, error reporting,
//! byte-stable JSON.

use std::fs;
use std::process::Command;

fn tvar() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tvar"))
}

#[test]
fn missing_required_flag_is_usage_error() {
    let out = tvar().args(["test"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_model_is_usage_error() {
    let out = tvar()
        .args(["simulate", "--model", "nosuch", "--n", "128"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("unknown model"), "{msg}");
}

#[test]
fn malformed_csv_names_line_and_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    fs::write(&path, "x\n1.0\nnot-a-number\n").unwrap();
    let out = tvar()
        .args(["fit", "--input", path.to_str().unwrap(), "--b", "1", "--c", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains(":3:"), "{msg}");
}

#[test]
fn nan_in_data_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nan.csv");
    fs::write(&path, "x\n1.0\nNaN\n2.0\n").unwrap();
    let out = tvar()
        .args(["fit", "--input", path.to_str().unwrap(), "--b", "1", "--c", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("non-finite"));
}

#[test]
fn constant_series_is_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("const.csv");
    let mut body = String::from("x\n");
    for _ in 0..64 {
        body.push_str("2.5\n");
    }
    fs::write(&path, body).unwrap();
    let out = tvar()
        .args(["fit", "--input", path.to_str().unwrap(), "--b", "1", "--c", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rank deficient"));
}

#[test]
fn same_argv_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("x.csv");
    let sim = tvar()
        .args(["simulate", "--model", "tvar2-null", "--n", "128", "--seed", "3"])
        .output()
        .unwrap();
    assert!(sim.status.success());
    fs::write(&csv, &sim.stdout).unwrap();

    let run = || {
        tvar()
            .args([
                "test",
                "--input",
                csv.to_str().unwrap(),
                "--basis",
                "fourier",
                "--c",
                "2",
                "--b-star",
                "2",
                "--m",
                "4",
                "--B",
                "200",
                "--seed",
                "7",
                "--draws",
            ])
            .output()
            .unwrap()
    };
    let a = run();
    let b = run();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "test output must be byte-identical");
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains("\"schema_version\":1"));
    assert!(text.contains("\"generated_by\":\"tvar "));
    assert!(text.contains("\"draws\":["));
}

#[test]
fn simulate_test_forecast_tune_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("x.csv");
    let status = tvar()
        .args([
            "simulate",
            "--model",
            "arma11",
            "--n",
            "512",
            "--seed",
            "11",
            "--output",
            csv.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());

    let forecast = tvar()
        .args([
            "forecast",
            "--input",
            csv.to_str().unwrap(),
            "--b",
            "2",
            "--c",
            "1",
        ])
        .output()
        .unwrap();
    assert!(forecast.status.success());
    let doc: serde_json::Value =
        serde_json::from_slice(&forecast.stdout).expect("forecast JSON parses");
    assert!(doc["point"].is_f64());
    assert!(doc["mse_hat"].as_f64().unwrap() > 0.0);
    assert_eq!(doc["phi_at_one"].as_array().unwrap().len(), 3);

    let tune = tvar()
        .args(["tune", "--input", csv.to_str().unwrap(), "--basis", "fourier"])
        .output()
        .unwrap();
    assert!(tune.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&tune.stdout).unwrap();
    assert!(doc["b_opt"].as_u64().unwrap() >= 1);
    assert!(doc["m_opt"].as_u64().unwrap() >= 1);
    assert!(doc["cv"]["cv_table"].is_array());
    assert!(doc["mv"]["mv_table"].is_array());

    // daub9 basis exercises the wavelet path end to end
    let test = tvar()
        .args([
            "test",
            "--input",
            csv.to_str().unwrap(),
            "--basis",
            "daub9",
            "--c",
            "4",
            "--b-star",
            "2",
            "--m",
            "5",
            "--B",
            "150",
        ])
        .output()
        .unwrap();
    assert!(test.status.success(), "{}", String::from_utf8_lossy(&test.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&test.stdout).unwrap();
    let p = doc["p_value"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&p));
    assert_eq!(doc["basis"].as_str().unwrap(), "daub9");
}

#[test]
fn updc_check_linear_models_only() {
    let ok = tvar()
        .args(["updc-check", "--model", "tvma2", "--n", "256"])
        .output()
        .unwrap();
    assert!(ok.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert!(doc["pass"].as_bool().unwrap());
    assert!(doc["kappa_min"].as_f64().unwrap() > 0.0);

    let err = tvar()
        .args(["updc-check", "--model", "bilinear", "--n", "256"])
        .output()
        .unwrap();
    assert_eq!(err.status.code(), Some(2));
}

#[test]
fn small_bootstrap_count_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("x.csv");
    let sim = tvar()
        .args(["simulate", "--model", "tvar2-null", "--n", "128", "--output", csv.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(sim.success());
    let out = tvar()
        .args([
            "test",
            "--input",
            csv.to_str().unwrap(),
            "--c",
            "2",
            "--b-star",
            "2",
            "--m",
            "4",
            "--B",
            "50",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
