use std::path::PathBuf;
use std::process::Command;

use cepgeo::report::*;
use cepgeo::run_with;
use cepgeo::schema::FilterDocument;
use serde::de::DeserializeOwned;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

/// Runs in-process; returns exit code, stdout and stderr.
fn cepgeo(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("cepgeo").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn parse<T: DeserializeOwned>(s: &str) -> T {
    serde_json::from_str(s).unwrap_or_else(|e| panic!("{e}\n{s}"))
}

#[test]
fn tensors_matches_golden_file() {
    let (code, out, _) = cepgeo(&["tensors", "--alpha", "0", &data("ar1.json")]);
    assert_eq!(code, 0);
    let golden = include_str!("golden/tensors_ar1.json");
    assert_eq!(out, golden);
}

#[test]
fn tensors_report_values_on_ar1() {
    let (_, out, _) = cepgeo(&["tensors", "--alpha", "0", &data("ar1.json")]);
    let r: TensorsReport = parse(&out);
    let close = |x: f64, want: f64| (x - want).abs() < 5e-7;
    assert!(close(r.tensor("metric").unwrap().get(&[0, 0]).unwrap().0, 1.333333));
    assert!(close(r.tensor("gamma").unwrap().get(&[0, 0, 0]).unwrap().0, 0.888889));
    assert!(close(r.tensor("ricci").unwrap().get(&[0, 0]).unwrap().0, -1.777778));
    assert!(close(r.scalar.0, -1.333333));
    for name in ["1.33333333333", "0.888888888889", "-1.77777777778"] {
        assert!(out.contains(name), "{name}");
    }
}

#[test]
fn alpha_changes_alpha_dependent_tensors_only() {
    let (_, a, _) = cepgeo(&["tensors", "--alpha", "-1", &data("arma22.json")]);
    let (_, b, _) = cepgeo(&["tensors", "--alpha", "1", &data("arma22.json")]);
    let (a, b): (TensorsReport, TensorsReport) = (parse(&a), parse(&b));
    assert_eq!(a.tensor("metric"), b.tensor("metric"));
    assert_eq!(a.tensor("t"), b.tensor("t"));
    assert_ne!(a.tensor("gamma"), b.tensor("gamma"));
    assert_eq!(a.alpha.0, -1.0);
}

#[test]
fn invalid_filter_exits_2_with_code() {
    let (code, out, err) = cepgeo(&["validate", &data("bad_pole.json")]);
    assert_eq!(code, 2);
    let r: ErrorReport = parse(&out);
    assert_eq!(r.error.code, "POLE_OUTSIDE_DISK");
    assert_eq!(r.error.violations.len(), 1);
    assert!(err.contains("POLE_OUTSIDE_DISK"));
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = dir.path().join("unknown.json");
    std::fs::write(&unknown, r#"{"gain": 1, "poles": [], "order": 3}"#).unwrap();
    let (code, out, _) = cepgeo(&["validate", unknown.to_str().unwrap()]);
    assert_eq!(
        (code, parse::<ErrorReport>(&out).error.code.as_str()),
        (2, "PARSE_ERROR")
    );

    let (code, out, _) = cepgeo(&["validate", "/nonexistent/filter.json"]);
    assert_eq!((code, parse::<ErrorReport>(&out).error.code.as_str()), (2, "IO_ERROR"));

    let (code, out, _) = cepgeo(&["oracle-compare", &data("ar1.json"), "--nodes", "1000"]);
    assert_eq!(
        (code, parse::<ErrorReport>(&out).error.code.as_str()),
        (2, "INVALID_NODES")
    );

    let (code, out, _) = cepgeo(&["check-prior", "--psi", "psi3", "--model", "ar:3"]);
    assert_eq!(
        (code, parse::<ErrorReport>(&out).error.code.as_str()),
        (2, "DIMENSION_MISMATCH")
    );
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(cepgeo(&["tensors", &data("ar1.json"), "--bogus"]).0, 2);
    assert_eq!(cepgeo(&["frobnicate"]).0, 2);
    assert_eq!(cepgeo(&["check-prior", "--psi", "psi1", "--model", "ar"]).0, 2);
    assert_eq!(cepgeo(&["tensors", &data("ar1.json"), "--format", "xml"]).0, 2);
    assert_eq!(cepgeo(&["--help"]).0, 0);
}

#[test]
fn oracle_compare_passes() {
    for file in ["ar1.json", "arma22.json"] {
        let (code, out, _) = cepgeo(&["oracle-compare", &data(file), "--nodes", "4096"]);
        assert_eq!(code, 0);
        let r: OracleReport = parse(&out);
        assert!(r.pass && r.max_residual.0 < 1e-8 && !r.unconverged);
    }
}

#[test]
fn strict_escalates_unconverged_quadrature() {
    let dir = tempfile::tempdir().unwrap();
    let near = dir.path().join("near.json");
    std::fs::write(&near, r#"{"gain": 1, "poles": [{"re": 0.995, "im": 0}]}"#).unwrap();
    let args = ["divergence", &data("ar1.json"), near.to_str().unwrap(), "--nodes", "64"];
    let (code, out, _) = cepgeo(&args);
    assert_eq!(code, 0);
    assert!(parse::<DivergenceReport>(&out).unconverged);
    let strict: Vec<&str> = args.iter().copied().chain(["--strict"]).collect();
    assert_eq!(cepgeo(&strict).0, 3);
}

#[test]
fn divergence_of_filter_with_itself_is_zero() {
    let f = data("arma22.json");
    let (code, out, _) = cepgeo(&["divergence", &f, &f, "--alpha", "-1"]);
    assert_eq!(code, 0);
    assert_eq!(parse::<DivergenceReport>(&out).value.0, 0.0);
}

#[test]
fn failed_checks_exit_1() {
    let (code, out, _) = cepgeo(&[
        "check-prior",
        "--psi",
        "psi2",
        "--model",
        "ar:1,ma:1",
        "--samples",
        "400",
        "--seed",
        "3",
    ]);
    let r: PriorReport = parse(&out);
    assert!(r.violations > 0);
    assert_eq!(code, 1);
    let (code, out, _) = cepgeo(&["check-prior", "--psi", "psi3", "--model", "ar:2", "--samples", "200"]);
    assert_eq!(code, 0);
    assert_eq!(parse::<PriorReport>(&out).violations, 0);
}

#[test]
fn every_report_round_trips() {
    let f = data("arma22.json");
    macro_rules! check {
        ($ty:ty, $($arg:expr),+) => {{
            let (_, out, _) = cepgeo(&[$($arg),+]);
            let r: $ty = parse(&out);
            let again = serde_json::to_string_pretty(&r).unwrap() + "\n";
            assert_eq!(again, out);
        }};
    }
    check!(ValidateReport, "validate", &f);
    check!(CepstrumReport, "cepstrum", &f, "--trunc", "32");
    check!(TensorsReport, "tensors", &f, "--alpha", "0.5");
    check!(DivergenceReport, "divergence", &f, &data("ar1.json"), "--alpha", "1.5");
    check!(OracleReport, "oracle-compare", &f, "--alpha", "-0.5");
    check!(DualityCheckReport, "duality-check", &f);
    check!(InvarianceCheckReport, "invariance-check", &f);
    check!(
        PriorReport,
        "check-prior",
        "--psi",
        "psi1",
        "--model",
        "ar:2,ma:1",
        "--samples",
        "50"
    );
    check!(ErrorReport, "validate", &data("bad_pole.json"));
}

#[test]
fn output_is_deterministic() {
    let runs = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_cepgeo"))
            .args([
                "check-prior",
                "--psi",
                "psi1",
                "--model",
                "ar:2,ma:1",
                "--samples",
                "300",
                "--seed",
                "11",
            ])
            .env("CEPGEO_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(runs("1"), runs("4"));
    let a = cepgeo(&["tensors", &data("arma22.json"), "--alpha", "0.3"]).1;
    let b = cepgeo(&["tensors", &data("arma22.json"), "--alpha", "0.3"]).1;
    assert_eq!(a, b);
}

#[test]
fn binary_exit_codes() {
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_cepgeo"))
            .args(args)
            .output()
            .unwrap()
            .status
            .code()
    };
    assert_eq!(run(&["validate", &data("ar1.json")]), Some(0));
    assert_eq!(run(&["validate", &data("bad_pole.json")]), Some(2));
    assert_eq!(
        run(&[
            "check-prior",
            "--psi",
            "psi2",
            "--model",
            "ar:1,ma:1",
            "--samples",
            "400",
            "--seed",
            "3"
        ]),
        Some(1)
    );
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_cepgeo"))
        .args(["check-prior", "--psi", "psi1", "--model", "ar:1", "--samples", "10"])
        .env("CEPGEO_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let (code, out, _) = cepgeo(&[
        "cepstrum",
        &data("ar1.json"),
        "--trunc",
        "4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let r: CepstrumReport = parse(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(r.coeffs.len(), 4);
    assert_eq!(r.coeffs[1].re.0, 0.125);
}

#[test]
fn table_format_renders() {
    let (code, out, _) = cepgeo(&["tensors", &data("ar1.json"), "--format", "table"]);
    assert_eq!(code, 0);
    assert!(out.contains("metric  [p1]"));
    assert!(out.contains("+1.333333e0+0.000000e0i"));
}

#[test]
fn filter_document_round_trips_through_spec() {
    let text = std::fs::read_to_string(data("arma22.json")).unwrap();
    let doc: FilterDocument = parse(&text);
    let again: FilterDocument = parse(&serde_json::to_string(&FilterDocument::from_spec(&doc.to_spec())).unwrap());
    assert_eq!(again, doc);
}
