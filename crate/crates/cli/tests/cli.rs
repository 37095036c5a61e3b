//! End-to-end runs of the `hermult` binary.

use std::process::{Command, Output};

use hermult::report::{CriterionOutput, Document, KernelRow, NormRow, SemigroupRow};
use hermult_core::trace::TraceReport;
use serde::de::DeserializeOwned;

fn hermult(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hermult")).args(args).output().expect("binary runs")
}

fn ok_json<T: DeserializeOwned>(args: &[&str]) -> (Document<T>, Vec<u8>) {
    let out = hermult(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    (serde_json::from_slice(&out.stdout).expect("valid document"), out.stdout)
}

fn error_object(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stderr).expect("stderr carries a JSON error object")
}

#[test]
fn semigroup_routes_agree_at_unit_time() {
    let (doc, _) = ok_json::<Vec<SemigroupRow>>(&["semigroup", "--n", "1", "--t", "1"]);
    assert_eq!(doc.schema, 1);
    let row = &doc.data[0];
    for v in [row.symbol_sum, row.diagonal_quadrature, row.closed_form] {
        assert!(format!("{v}").starts_with("0.4254590"), "{v}");
    }

    let csv = hermult(&["semigroup", "--n", "1", "--t", "1", "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,n,symbol_sum,diagonal_quadrature,closed_form,N,max_abs_difference"));
    assert_eq!(lines.next().unwrap().matches("0.4254590").count(), 3);
}

#[test]
fn heat_criterion_is_finite() {
    let (doc, _) = ok_json::<CriterionOutput>(&[
        "criterion", "--p1", "2", "--p2", "2", "--r", "1", "--symbol", "heat:1",
    ]);
    let report = doc.data.kappa;
    assert_eq!(serde_json::to_value(report.verdict).unwrap(), "finite");
    assert!((report.partial_sum - 0.425459).abs() < 1e-6);
}

#[test]
fn gl_order_resolves_r() {
    let (doc, _) = ok_json::<CriterionOutput>(&["criterion", "--p1", "2", "--p2", "2", "--gl-order", "2"]);
    assert_eq!(doc.data.kappa.r, 1.0);
    let (doc, _) = ok_json::<CriterionOutput>(&["criterion", "--p1", "2", "--p2", "2", "--gl-order", "4"]);
    assert_eq!(doc.data.kappa.r, 0.8);
    let out = hermult(&["criterion", "--r", "1", "--gl-order", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn p1_equal_one_is_an_unsupported_regime() {
    let out = hermult(&["criterion", "--p1", "1", "--p2", "2", "--r", "1", "--symbol", "heat:1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
    let err = error_object(&out);
    assert_eq!(err["schema"], 1);
    assert_eq!(err["error"], "unsupported_regime");
    assert!(err["hypothesis"].as_str().unwrap().contains("p1"));
}

#[test]
fn config_errors_exit_two() {
    for args in [
        &["trace", "--bogus"][..],
        &["semigroup", "--t", "-1"],
        &["criterion", "--symbol", "gauss:1"],
        &["criterion", "--symbol", "table:/nonexistent/m.csv"],
        &["frobnicate"],
    ] {
        let out = hermult(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert_eq!(error_object(&out)["schema"], 1);
    }
}

#[test]
fn slow_tails_exit_four() {
    let out = hermult(&["trace", "--n", "2", "--symbol", "power:3"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(error_object(&out)["error"], "convergence");
}

#[test]
fn output_is_deterministic() {
    let commands: [&[&str]; 4] = [
        &["semigroup", "--n", "2", "--t", "0.5,1,2"],
        &["criterion", "--p1", "4/3", "--p2", "6", "--symbol", "heat:0.5", "--N", "60", "--direct"],
        &["kernel", "--t", "1", "--points", "3", "--N", "40", "--format", "csv"],
        &["norms", "--degree", "5,40", "--p", "1,4,inf"],
    ];
    for args in commands {
        let a = hermult(args);
        let b = hermult(args);
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn json_documents_round_trip() {
    fn check<T: DeserializeOwned + serde::Serialize>(args: &[&str]) {
        let (doc, raw) = ok_json::<T>(args);
        let mut again = serde_json::to_vec_pretty(&doc).unwrap();
        again.push(b'\n');
        assert_eq!(again, raw, "{args:?}");
    }
    check::<Vec<SemigroupRow>>(&["semigroup", "--t", "0.5,2"]);
    check::<CriterionOutput>(&["criterion", "--p1", "1.2", "--p2", "4", "--N", "40", "--direct"]);
    check::<TraceReport>(&["trace", "--n", "2", "--symbol", "heat:1"]);
    check::<Vec<KernelRow>>(&["kernel", "--points", "2", "--N", "30"]);
    check::<Vec<NormRow>>(&["norms", "--degree", "20", "--p", "2,inf"]);
}

#[test]
fn table_symbols_and_output_files() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("m.csv");
    std::fs::write(&table, "nu1,value\n0,0.5\n1,0.25\n2,0.125\n").unwrap();
    let target = dir.path().join("trace.json");
    let spec = format!("table:{}", table.display());
    let out = hermult(&["trace", "--symbol", &spec, "--output", target.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let doc: Document<TraceReport> = serde_json::from_slice(&std::fs::read(&target).unwrap()).unwrap();
    assert!((doc.data.symbol_sum.value - 0.875).abs() < 1e-15);
    assert!((doc.data.diagonal_quadrature.value - 0.875).abs() < 1e-12);
}
