use std::process::Command;

fn chiquad(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_chiquad")).args(args).output().expect("binary runs")
}

#[test]
fn table_csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert!(chiquad(&["table", "1", "--format", "csv", "--out", a.to_str().unwrap()]).status.success());
    assert!(chiquad(&["table", "1", "--format", "csv", "--serial", "--out", b.to_str().unwrap()]).status.success());
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 1 + 24);
    assert!(text.starts_with("table,method,alpha,nu,budget,epsilon,value,error,evaluations"));
}

#[test]
fn table_two_cell() {
    let out = chiquad(&["table", "2", "--alpha", "0.02", "--nu", "3", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let err = v["cells"][0]["error"].as_f64().unwrap();
    assert!((err / 3.39e-4 - 1.0).abs() < 0.01, "{err}");
}

#[test]
fn figure_four_rows() {
    let out = chiquad(&["figure", "4"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.iter().filter(|r| r.starts_with("1,65,")).count(), 35);
    assert_eq!(rows.iter().filter(|r| r.starts_with("2,33,")).count(), 24);
}

#[test]
fn integrate_reports_history() {
    let out = chiquad(&[
        "integrate", "mori-trapezoid", "--nu", "2", "--integrand", "t-interval:0.05", "--epsilon", "1e-17", "--json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["value"].as_f64().unwrap() - 0.95).abs() < 1e-15);
    assert!(v["history"].as_array().unwrap().len() >= 4);

    let out = chiquad(&["integrate", "mori-trapezoid", "--nu", "2", "--integrand", "constant", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-15);

    let out = chiquad(&["integrate", "gauss-laguerre", "--nu", "1", "--budget", "65", "--integrand", "t-interval:0.10", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["error"].as_f64().unwrap() / 1.44e-2 - 1.0).abs() < 0.01);
}

#[test]
fn exit_codes() {
    assert_eq!(chiquad(&["integrate", "simpson", "--nu", "2"]).status.code(), Some(2));
    assert_eq!(chiquad(&["integrate", "inverse-cdf", "--nu", "2", "--integrand", "sine"]).status.code(), Some(2));
    assert_eq!(chiquad(&["integrate", "inverse-cdf", "--nu", "0"]).status.code(), Some(2));
    assert_eq!(chiquad(&["table", "7"]).status.code(), Some(2));
    assert_eq!(chiquad(&["figure", "2"]).status.code(), Some(2));
    assert_eq!(chiquad(&["table", "1", "--nu", "2", "--budget", "30"]).status.code(), Some(1));
    assert_eq!(chiquad(&["table", "3", "--nu", "2", "--alpha", "0.1"]).status.code(), Some(0));
}
