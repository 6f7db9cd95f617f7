//! End-to-end tests against the built binary.

use std::process::{Command, Output};

fn mockrad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mockrad"))
        .args(args)
        .env_remove("MOCK_RADIAL_TOLERANCE")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn classify_reports_case_and_memberships() {
    let out = mockrad(&["classify", "0/1", "1/2", "1/3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("DenominatorPole"));
    assert!(text.contains("in Q        true"));

    let out = mockrad(&["classify", "0/1", "1/2", "1/4"]);
    assert!(stdout(&out).contains("EvenTerminating"));
}

#[test]
fn classify_rejects_malformed_fractions() {
    let out = mockrad(&["classify", "0/1", "1/2", "x/y"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("error"));
}

#[test]
fn classify_canonicalizes_with_notice() {
    let out = mockrad(&["classify", "0/1", "1/2", "5/3"]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("canonicalized to 2/3"));
}

#[test]
fn limit_closed_form_value() {
    let out = mockrad(&["limit", "0/1", "1/2", "0/1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("-5.0000000000000000e-1"), "{text}");
    assert!(text.contains("MortensonT"));
}

#[test]
fn limit_numeric_json_record() {
    let out = mockrad(&["limit", "0/1", "1/2", "1/4", "--numeric", "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["case"], "EvenTerminating");
    assert_eq!(v["status"], "pass");
    assert!(v["abs_diff"].as_f64().unwrap() < 1e-3);
    for key in [
        "params",
        "cusp",
        "correction",
        "q_re",
        "q_im",
        "numeric_re",
        "numeric_im",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn verify_identity_runs_and_unknown_name_is_usage_error() {
    let out = mockrad(&["verify-identity", "curious-62"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("pass"));

    let out = mockrad(&["verify-identity", "nosuch"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("mortenson") && err.contains("watson"), "{err}");
}

#[test]
fn sweep_writes_deterministic_csv() {
    let dir = std::env::temp_dir();
    let p1 = dir.join("mockrad_sweep_a.csv");
    let p2 = dir.join("mockrad_sweep_b.csv");
    for p in [&p1, &p2] {
        let out = mockrad(&[
            "sweep",
            "0/1",
            "1/2",
            "--kmax",
            "3",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        assert!(stderr(&out).contains("pass rate 4/4"));
    }
    let a = std::fs::read(&p1).unwrap();
    let b = std::fs::read(&p2).unwrap();
    assert_eq!(a, b, "sweep output is not byte-identical");
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "schema_version,params,cusp,case,correction,q_re,q_im,numeric_re,numeric_im,abs_diff,status"
    );
    assert_eq!(text.lines().count(), 5);
    std::fs::remove_file(p1).ok();
    std::fs::remove_file(p2).ok();
}

#[test]
fn sweep_kmax_one_is_single_cusp() {
    let out = mockrad(&["sweep", "0/1", "1/2", "--kmax", "1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 2); // header + 0/1
}

#[test]
fn eta_order_exact_rational() {
    let out = mockrad(&["eta-order", "eta(1)^1", "0/1"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("order 1/24"));

    let out = mockrad(&["eta-order", "q^(-1/2)*eta(4)^5*eta(2)^-4", "1/3"]);
    assert!(stdout(&out).contains("order -1/32 (pole)"));

    let out = mockrad(&["eta-order", "eta(", "0/1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("position"));
}

#[test]
fn tolerance_env_var_is_honored() {
    let out = Command::new(env!("CARGO_BIN_EXE_mockrad"))
        .args(["limit", "0/1", "1/2", "1/4", "--numeric"])
        .env("MOCK_RADIAL_TOLERANCE", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = Command::new(env!("CARGO_BIN_EXE_mockrad"))
        .args(["limit", "0/1", "1/2", "1/4", "--numeric"])
        .env("MOCK_RADIAL_TOLERANCE", "1e-4")
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn mismatched_verification_exits_one() {
    // An extremely tight tolerance turns a healthy verification into a
    // reported failure with exit code 1.
    let out = mockrad(&[
        "limit",
        "0/1",
        "1/2",
        "1/3",
        "--numeric",
        "--tolerance",
        "1e-10",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("verification failure"));
}
