use std::path::PathBuf;
use std::process::{Command, Output};

fn tapmeans(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tapmeans"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tapmeans-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

#[test]
fn verify_default_passes() {
    let out = tapmeans(&["--cmd", "verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows.len(), 7);
    assert!(rows.iter().all(|r| r[1] == "true"));
}

#[test]
fn verify_fault_fails_naming_taylor_suite() {
    let out = tapmeans(&["--cmd", "verify", "--self-test-fault"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("taylor-form"), "{err}");
}

#[test]
fn zero_dimension_is_usage_error() {
    for cmd in ["verify", "rates", "kfun", "multnorm"] {
        let out = tapmeans(&["--cmd", cmd, "--d", "0"]);
        assert_eq!(out.status.code(), Some(2), "{cmd}");
    }
}

#[test]
fn malformed_flags_are_usage_errors() {
    assert_eq!(tapmeans(&["--cmd", "nope"]).status.code(), Some(2));
    assert_eq!(tapmeans(&["--cmd", "kfun", "--p", "0.5"]).status.code(), Some(2));
    assert_eq!(tapmeans(&["--cmd", "rates", "--j0", "5", "--j1", "5"]).status.code(), Some(2));
    assert_eq!(tapmeans(&["--cmd", "rates", "--modulus", "sine:1"]).status.code(), Some(2));
    assert_eq!(tapmeans(&["--cmd", "rates", "--n", "3", "--r", "2"]).status.code(), Some(2));
    assert_eq!(tapmeans(&["--help"]).status.code(), Some(0));
}

#[test]
fn rates_writes_csv_and_summary() {
    let out_path = scratch("rates.csv");
    let out = tapmeans(&[
        "--cmd", "rates", "--d", "1", "--K", "16384", "--r", "2", "--n", "1", "--alpha", "0.5", "--j0", "4",
        "--out", out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.starts_with("j,rho,error,fitted,residual"));
    assert_eq!(csv_rows(&text).len(), 9);
    let mut summary_path = out_path.into_os_string();
    summary_path.push(".summary.json");
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(summary_path).unwrap()).unwrap();
    let slope = summary["slope"].as_f64().unwrap();
    assert!((slope - 1.5).abs() < 0.15, "{slope}");
    assert_eq!(summary["verdict"], "pass");
}

#[test]
fn rates_refuses_inadmissible_majorant() {
    let out = tapmeans(&["--cmd", "rates", "--n", "1", "--alpha", "1", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(summary["verdict"].as_str().unwrap().starts_with("refused"));
    assert_eq!(summary["zbs"]["zn"]["verdict"], "fails");
}

#[test]
fn rates_on_input_polynomial_reports_exact_reproduction() {
    let path = scratch("poly.json");
    std::fs::write(&path, r#"{"d":2,"K":2,"real":false,"coeffs":[[[1,0],1.0,0.0],[[0,0],2.0,0.0]]}"#).unwrap();
    let out = tapmeans(&["--cmd", "rates", "--r", "2", "--input", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["verdict"], "exact reproduction");
    assert!(summary["slope"].is_null());
}

#[test]
fn kfun_single_mode_matches_closed_form() {
    let path = scratch("mode.json");
    std::fs::write(&path, r#"{"d":1,"K":4,"real":false,"coeffs":[[[4],1.0,0.0]]}"#).unwrap();
    let out = tapmeans(&["--cmd", "kfun", "--n", "2", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for row in csv_rows(&String::from_utf8(out.stdout).unwrap()) {
        let rho: f64 = row[1].parse().unwrap();
        let k: f64 = row[3].parse().unwrap();
        let want = ((1.0 - rho).powi(2) * 12.0).min(1.0);
        assert!((k - want).abs() < 1e-12, "rho={rho}: {k} vs {want}");
    }
}

#[test]
fn multnorm_p2_agrees_across_dimensions() {
    let out = tapmeans(&["--cmd", "multnorm", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for entry in summary["results"].as_array().unwrap() {
        let est = entry["estimates"].as_array().unwrap();
        assert_eq!(est.len(), 3);
        assert_eq!(est[0]["exact"], est[1]["exact"]);
        assert_eq!(est[1]["exact"], est[2]["exact"]);
    }
}

#[test]
fn multnorm_bracket_at_p1() {
    let out = tapmeans(&["--cmd", "multnorm", "--p", "1", "--K", "6"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for row in csv_rows(&String::from_utf8(out.stdout).unwrap()) {
        let lower: f64 = row[4].parse().unwrap();
        let upper: f64 = row[5].parse().unwrap();
        assert!(lower <= upper * (1.0 + 1e-12), "{row:?}");
    }
}

#[test]
fn outputs_are_deterministic() {
    // Phases only matter away from p = 2.
    let run = |seed: &str| tapmeans(&["--cmd", "kfun", "--d", "1", "--K", "8", "--p", "1", "--seed", seed]);
    let a = run("5");
    let b = run("5");
    assert_eq!(a.stdout, b.stdout);
    let c = run("6");
    assert_ne!(a.stdout, c.stdout);
}
