use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_foxwright"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_rows(out: &Output) -> Vec<serde_json::Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("each line is JSON"))
        .collect()
}

#[test]
fn eval_grid_rows() {
    let p = data("set_a.json");
    let out = run(&["eval", "--params", p.to_str().unwrap(), "--z", "0:2:5"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = json_rows(&out);
    assert_eq!(rows.len(), 5);
    let zs: Vec<f64> = rows.iter().map(|r| r["z"].as_f64().unwrap()).collect();
    assert_eq!(zs, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    // Psi(0) = Γ(1) / (Γ(1/2) Γ(1))
    let v0 = rows[0]["value_or_verdict"].as_f64().unwrap();
    assert!((v0 - 1.0 / std::f64::consts::PI.sqrt()).abs() < 1e-15);
    assert!(rows.iter().all(|r| r["status"] == "ok"));
}

#[test]
fn moment_residuals_are_small() {
    let p = data("set_b.json");
    let out = run(&["moments", "--params", p.to_str().unwrap(), "--k", "0..8"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = json_rows(&out);
    assert_eq!(rows.len(), 9);
    for r in &rows {
        assert_eq!(r["value_or_verdict"], "verified");
        assert!(r["rel_err"].as_f64().unwrap() <= 1e-6);
    }
}

#[test]
fn missing_parameter_file_names_path() {
    let out = run(&["eval", "--params", "missing.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.json"));
    assert!(out.stdout.is_empty());
}

#[test]
fn malformed_parameters_print_schema() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"upper": [[1, -1]], "lower": []}"#).unwrap();
    let out = run(&["eval", "--params", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.json") && err.contains("\"upper\""));
}

#[test]
fn usage_errors_exit_one() {
    let p = data("set_a.json");
    let p = p.to_str().unwrap();
    for args in [
        vec!["eval", "--params", p, "--z", "0:1:0"],
        vec!["eval", "--params", p, "--tol", "0"],
        vec!["frobnicate"],
        vec!["eval"],
    ] {
        assert_eq!(run(&args).status.code(), Some(1), "{args:?}");
    }
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn csv_file_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let p = data("set_c.json");
    let mut texts = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let out_path = dir.path().join(name);
        let out = run(&[
            "verify-stieltjes",
            "--params",
            p.to_str().unwrap(),
            "--z",
            "0.2,0.5,0.8",
            "--sigma",
            "2",
            "--output",
            "csv",
            "--out",
            out_path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
        texts.push(std::fs::read_to_string(out_path).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
    let lines: Vec<&str> = texts[0].lines().collect();
    assert!(lines[0].starts_with("command,params_hash,z,value_or_verdict,abs_err,rel_err,status"));
    assert_eq!(lines.len(), 4);
    assert!(lines[1..].iter().all(|l| l.contains(",verified,")));
}

#[test]
fn negative_grid_values_are_accepted() {
    let p = data("set_b.json");
    let out = run(&[
        "verify-representation",
        "--params",
        p.to_str().unwrap(),
        "--z",
        "-1,2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_rows(&out).len(), 2);
}

#[test]
fn numerical_errors_stay_per_row() {
    let p = data("set_c.json");
    let out = run(&["hfun", "--params", p.to_str().unwrap(), "--t", "0.5,1.5"]);
    assert_eq!(out.status.code(), Some(2));
    let rows = json_rows(&out);
    assert_eq!(rows[0]["status"], "ok");
    assert_eq!(rows[1]["status"], "error");
}

#[test]
fn bounds_on_reference_sets() {
    let c = data("set_c.json");
    let out = run(&[
        "bounds",
        "--params",
        c.to_str().unwrap(),
        "--z",
        "0.5,1",
        "--lambda",
        "2",
        "--sigma",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = json_rows(&out);
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r["value_or_verdict"] == "holds"));

    let a = data("set_a.json");
    let out = run(&["bounds", "--params", a.to_str().unwrap(), "--z", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json_rows(&out)[0]["status"], "error");
}

#[test]
fn cm_check_passes_on_positive_density() {
    let p = data("set_c.json");
    let out = run(&[
        "cm-check",
        "--params",
        p.to_str().unwrap(),
        "--z",
        "0.01:10:30",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        json_rows(&out)[0]["value_or_verdict"],
        "completely-monotone"
    );
}

#[test]
fn ratio_scan_reports_both_routes() {
    let p = data("set_c.json");
    let out = run(&[
        "ratio-scan",
        "--params",
        p.to_str().unwrap(),
        "--z",
        "0.2:0.8:4",
        "--delta",
        "1",
    ]);
    let rows = json_rows(&out);
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert!(r["rel_err"].as_f64().unwrap() < 1e-6);
    }
    // exit status reflects whether the expected direction held on the grid
    let failed = rows.iter().any(|r| r["status"] != "ok");
    assert_eq!(out.status.code(), Some(if failed { 2 } else { 0 }));
}
