use binform::cli::{run, EXIT_INPUT, EXIT_INCONSISTENT, EXIT_OK};
use serde_json::Value;
use std::io::Write;
use std::process::Command;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("binform").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = call(args);
    assert_eq!(code, EXIT_OK, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schemaVersion"], 1);
    v
}

#[test]
fn roots_of_three_lines() {
    let v = json(&["roots", "x^2*y + x*y^2"]);
    assert_eq!(v["degree"], 3);
    assert_eq!(v["realProjectiveRoots"], 3);
    assert_eq!(v["squarefree"], true);
    assert_eq!(v["allRealDistinct"], true);
    assert_eq!(v["roots"].as_array().unwrap().len(), 3);
}

#[test]
fn verify_sum_of_cubes() {
    let v = json(&["verify", "x^3 + y^3"]);
    assert_eq!(v["criterionA"], false);
    assert_eq!(v["criterionB"], false);
    assert_eq!(v["consistent"], true);
}

#[test]
fn rank_of_real_rooted_cubic() {
    let v = json(&["rank", "x^3 - 3*x*y^2"]);
    assert_eq!(v["realExact"], 3);
    assert_eq!(v["complexExact"], 2);
    assert_eq!(v["method"], "corollary_top_rank");
}

#[test]
fn remaining_subcommands_emit_json() {
    let v = json(&["disc", "x^2 - y^2"]);
    assert_eq!(v["squarefree"], true);
    let v = json(&["hessian", "x^3 - 3*x*y^2"]);
    assert_eq!(v["definite"], true);
    let v = json(&["winding", "x^3 - 3*x*y^2"]);
    assert_eq!(v["windingPhi"], -2);
    assert_eq!(v["windingPsi"], -3);
    assert_eq!(v["windingPhiExact"], -2);
    let v = json(&["decompose", "x^3 + y^3"]);
    assert_eq!(v["length"], 2);
}

#[test]
fn input_errors_exit_two() {
    for args in [
        &["roots", "x^2 + y"][..],
        &["roots", "x^2 +"],
        &["verify", "x^2 - y^2"],
        &["verify", "(x - y)^2*x"],
        &["winding", "0"],
        &["nonsense"],
        &["roots"],
    ] {
        let (code, out, err) = call(args);
        assert_eq!(code, EXIT_INPUT, "{args:?}");
        assert!(out.is_empty() && !err.is_empty(), "{args:?}");
    }
}

#[test]
fn help_goes_to_stdout() {
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("plot-data"));
}

#[test]
fn verify_never_flags_the_corpus() {
    let corpus = include_str!("data/verify_corpus.txt");
    for line in corpus.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
        let (code, out, err) = call(&["verify", "--corollary", line]);
        assert_ne!(code, EXIT_INCONSISTENT, "{line}: {err}");
        assert_eq!(code, EXIT_OK, "{line}: {err}");
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["consistent"], true, "{line}");
        assert!(v["violations"].as_array().unwrap().is_empty(), "{line}");
        assert_ne!(v["corollary"]["outcome"], "inconsistent", "{line}");
    }
}

#[test]
fn form_from_file_and_coefficient_json() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "x^2*y + x*y^2").unwrap();
    let path = file.path().to_str().unwrap();
    assert_eq!(json(&["roots", "--file", path])["realProjectiveRoots"], 3);

    let v = json(&["roots", r#"{"degree":3,"coeffs":["0","1","1","0"]}"#]);
    assert_eq!(v["realProjectiveRoots"], 3);
    let v = json(&["rank", r#"{"degree":3,"coeffs":["1","0","-3","0"]}"#]);
    assert_eq!(v["realExact"], 3);

    let (code, _, _) = call(&["roots", r#"{"degree":3,"coeffs":["1","0"]}"#]);
    assert_eq!(code, EXIT_INPUT);
    let (code, _, _) = call(&["roots", r#"{"degree":1,"coeffs":[1.5, 2]}"#]);
    assert_eq!(code, EXIT_INPUT);
}

#[test]
fn csv_and_text_formats() {
    let (code, out, _) = call(&["roots", "x^2*y + x*y^2", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    let row = rdr.records().next().unwrap().unwrap();
    let at = headers.iter().position(|h| h == "realProjectiveRoots").unwrap();
    assert_eq!(&row[at], "3");
    assert!(headers.iter().any(|h| h == "schemaVersion"));

    let (code, out, _) = call(&["verify", "x^3 + y^3", "--format", "text"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.lines().any(|l| l == "criterionA: false"));
}

fn plot(form: &str, map: &str, steps: &str) -> Vec<[f64; 4]> {
    let (code, out, err) = call(&["plot-data", form, "--map", map, "--steps", steps]);
    assert_eq!(code, EXIT_OK, "{err}");
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("theta,vx,vy,angular_velocity"));
    lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
            [v[0], v[1], v[2], v[3]]
        })
        .collect()
}

#[test]
fn plot_data_rows_are_unit_vectors() {
    let rows = plot("x^2*y + x*y^2", "phi", "8");
    assert_eq!(rows.len(), 8);
    for r in &rows {
        assert!((r[1].hypot(r[2]) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn psi_is_phi_rotated_back() {
    let phi = plot("x^3 - x*y^2 + 2*y^3", "phi", "32");
    let psi = plot("x^3 - x*y^2 + 2*y^3", "psi", "32");
    for (a, b) in phi.iter().zip(&psi) {
        let (c, s) = (a[0].cos(), a[0].sin());
        assert!((c * a[1] + s * a[2] - b[1]).abs() < 1e-12);
        assert!((-s * a[1] + c * a[2] - b[2]).abs() < 1e-12);
    }
}

#[test]
fn real_rooted_plot_turns_clockwise() {
    for form in ["x^2*y + x*y^2", "x^4 - 5*x^2*y^2 + 4*y^4", "x*y*(x - y)*(x + y)*(x - 2*y)"] {
        assert!(plot(form, "phi", "720").iter().all(|r| r[3] < 0.0), "{form}");
    }
}

#[test]
fn experiment_is_reproducible() {
    let args = ["experiment", "--kind", "typical-rank", "--samples", "20", "--seed", "7", "--workers", "1"];
    let (code, first, err) = call(&args);
    assert_eq!(code, EXIT_OK, "{err}");
    let (_, second, _) = call(&args);
    assert_eq!(first, second);
    let v: Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["schemaVersion"], 1);
    assert_eq!(v["samples"], 20);
    assert!(v.get("wallTimeSeconds").is_none());

    let (code, out, _) = call(&["experiment", "--kind", "theorem-fuzz", "--samples", "10", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("histogram,bucket,count\n"));
}

#[test]
fn experiment_config_file() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, r#"{{"degree": 4, "samples": 5, "coefficientDistribution": "uniform_int"}}"#).unwrap();
    let path = file.path().to_str().unwrap();
    let v = parsed(&["experiment", "--config", path, "--seed", "3"]);
    assert_eq!(v["config"]["degree"], 4);
    assert_eq!(v["config"]["seed"], 3);

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    write!(bad, r#"{{"degre": 4}}"#).unwrap();
    let (code, _, _) = call(&["experiment", "--config", bad.path().to_str().unwrap()]);
    assert_eq!(code, EXIT_INPUT);
    let (code, _, _) = call(&["experiment", "--degree", "2"]);
    assert_eq!(code, EXIT_INPUT);
}

fn parsed(args: &[&str]) -> Value {
    let (code, out, err) = call(args);
    assert_eq!(code, EXIT_OK, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn binary_runs() {
    let out = Command::new(env!("CARGO_BIN_EXE_binform"))
        .args(["roots", "x^2*y + x*y^2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["allRealDistinct"], true);

    let out = Command::new(env!("CARGO_BIN_EXE_binform")).args(["roots", "x^2 + y"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_INPUT));
    assert!(!out.stderr.is_empty());
}
