use std::fs;
use std::process::{Command, Output};

use gup_hydrogen::export::SpectrumReport;
use gup_hydrogen::verify::{Status, VerifyReport};
use gup_hydrogen::{Method, SpectrumTable};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gup-hydrogen"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_record(o: &Output) -> serde_json::Value {
    let text = String::from_utf8(o.stderr.clone()).unwrap();
    let line = text.lines().last().expect("error record on stderr");
    serde_json::from_str(line).expect("error record is JSON")
}

#[test]
fn spectrum_csv_has_stable_header_and_five_rows() {
    let out = run(&["spectrum", "--alpha", "1", "--beta", "0.01", "--levels", "1..5", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,energy_closed_form,energy_root_found,energy_semiclassical,energy_perturbative,\
         delta_root_found,delta_semiclassical,delta_perturbative"
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 5);
    for r in &rows {
        for m in 2..=4 {
            assert!((r[m] - r[1] - r[m + 3]).abs() <= 1e-15, "{r:?}");
        }
        assert!(r[5].abs() < 1e-14 && r[6].abs() < 1e-14);
    }
    let again = run(&["spectrum", "--alpha", "1", "--beta", "0.01", "--levels", "1..5", "--format", "csv"]);
    assert_eq!(stdout(&again), text);
}

#[test]
fn spectrum_json_follows_table_schema_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spectrum.json");
    let out = run(&[
        "spectrum", "--alpha", "2", "--beta", "0.1", "--levels", "2..4", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    for table in value["tables"].as_array().unwrap() {
        for key in ["params", "method", "levels", "tolerances", "tool_version"] {
            assert!(table.get(key).is_some(), "missing {key}");
        }
        let level = &table["levels"][0];
        assert_eq!(level.as_object().unwrap().keys().collect::<Vec<_>>(), ["n", "epsilon", "energy"]);
    }
    let report = SpectrumReport::from_json(&text).unwrap();
    assert_eq!(report.to_json().unwrap(), text);
    assert_eq!(report.table(Method::ClosedForm).unwrap().levels.len(), 3);
}

#[test]
fn undeformed_spectrum_omits_root_finding() {
    let out = run(&["spectrum", "--alpha", "2", "--beta", "0", "--levels", "1..1"]);
    assert_eq!(out.status.code(), Some(0));
    let report = SpectrumReport::from_json(&stdout(&out)).unwrap();
    assert!(report.table(Method::RootFound).is_none());
    assert_eq!(report.table(Method::ClosedForm).unwrap().levels[0].energy, -1.0);
}

#[test]
fn semiclassical_json_is_a_single_table() {
    let out = run(&["semiclassical", "--alpha", "1", "--beta", "0.01", "--levels", "1..3"]);
    assert_eq!(out.status.code(), Some(0));
    let table: SpectrumTable = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(table.method, Method::Semiclassical);
    assert_eq!(table.levels.len(), 3);
}

#[test]
fn wavefn_diagnostics_on_the_spectrum() {
    let out = run(&["wavefn", "--alpha", "1", "--beta", "0.01", "--n", "1", "--grid-points", "512"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let d = &doc["diagnostics"];
    assert!(d["abs_im_c"].as_f64().unwrap() < 1e-10);
    assert!(d["abs_integral_phi"].as_f64().unwrap() < 1e-8);
    assert!((d["norm"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    assert_eq!(doc["samples"].as_array().unwrap().len(), 512);
    assert_eq!(doc["kind"], "momentum_p");
}

#[test]
fn csv_diagnostics_go_next_to_the_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eta.csv");
    let out = run(&[
        "coord", "--alpha", "1", "--beta", "0.01", "--n", "2", "--x-range", "-10..10", "--format", "csv", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let samples = fs::read_to_string(&path).unwrap();
    assert!(samples.starts_with("x,re,im,modulus_squared\n"));
    assert_eq!(samples.lines().count(), 514);
    let diagnostics = fs::read_to_string(dir.path().join("eta.csv.diagnostics.csv")).unwrap();
    let mut rows = diagnostics.lines();
    let header: Vec<&str> = rows.next().unwrap().split(',').collect();
    let values: Vec<&str> = rows.next().unwrap().split(',').collect();
    let field = |k: &str| values[header.iter().position(|h| *h == k).unwrap()];
    assert_eq!(field("formal_solution"), "true");
    assert!(field("origin_ratio").parse::<f64>().unwrap() < 1e-6);
}

#[test]
fn quasiposition_does_not_vanish_at_the_origin() {
    let out = run(&["quasipos", "--alpha", "1", "--beta", "0.1", "--n", "1", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let diagnostics = String::from_utf8(out.stderr).unwrap();
    assert!(diagnostics.starts_with("kind,formal_solution,"));
    let doc = run(&["quasipos", "--alpha", "1", "--beta", "0.1", "--n", "1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&doc)).unwrap();
    assert!(v["diagnostics"]["origin_ratio"].as_f64().unwrap() > 1e-2);
    assert!(v.get("note").is_none());
}

#[test]
fn wavefn_cutoff_reports_the_p4_moment() {
    let out = run(&["wavefn", "--alpha", "1", "--beta", "0.01", "--grid-points", "256", "--cutoff", "50"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let d = &doc["diagnostics"];
    assert_eq!(d["cutoff"].as_f64(), Some(50.0));
    assert!(d["moment_p4_cutoff"].as_f64().unwrap() > 0.0);
}

#[test]
fn verify_passes_and_reports_every_criterion() {
    let out = run(&["verify", "--alpha", "1", "--beta", "0.1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let report = VerifyReport::from_json(&text).unwrap();
    assert!(report.passed());
    assert!((1..=13).all(|k| report.checks.iter().any(|c| c.criterion == k && c.status == Status::Pass)));
    assert_eq!(report.to_json().unwrap(), text);
    let lines = String::from_utf8(out.stderr).unwrap();
    assert_eq!(lines.lines().filter(|l| l.starts_with("PASS")).count(), report.checks.len());
}

#[test]
fn verify_failure_exits_with_three() {
    let out = run(&["verify", "--alpha", "1", "--beta", "1e-4", "--levels", "1..2", "--grid-points", "64"]);
    assert_eq!(out.status.code(), Some(3));
    let report = VerifyReport::from_json(&stdout(&out)).unwrap();
    assert!(!report.passed());
}

#[test]
fn validation_errors_exit_with_one() {
    for args in [
        vec!["spectrum", "--alpha", "0"],
        vec!["spectrum", "--alpha", "1", "--levels", "3..1"],
        vec!["spectrum", "--alpha", "1", "--levels", "0..2"],
        vec!["wavefn", "--alpha", "1", "--beta", "0.01", "--grid-points", "63"],
        vec!["wavefn", "--alpha", "1", "--beta", "0"],
        vec!["spectrum", "--alpha", "1", "--format", "xml"],
        vec!["spectrum", "--alpha", "1", "--tol-spectrum", "-1"],
        vec!["quasipos", "--alpha", "1", "--beta", "0.1", "--xi-range", "5..-5"],
        vec!["bogus"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let record = error_record(&out);
        assert_eq!(record["error"]["exit_code"], 1, "{args:?}");
        assert!(record["error"]["kind"].is_string());
    }
}

#[test]
fn unwritable_output_is_a_validation_error() {
    let out = run(&["spectrum", "--alpha", "1", "--out", "/nonexistent-dir/spectrum.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_record(&out)["error"]["kind"], "output");
}

#[test]
fn non_convergence_exits_with_two() {
    let out = run(&["spectrum", "--alpha", "1", "--beta", "0.01", "--tol-quadrature", "1e-300"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_record(&out)["error"]["kind"], "quadrature_non_convergence");
}
