//! End-to-end tests driving the compiled binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn googol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_googol"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_instance(name: &str, body: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("googol-test-{name}-{}.json", std::process::id()));
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn exact_f_table_reaches_limit() {
    let out = googol(&[
        "exact",
        "--op",
        "F",
        "--k",
        "2..40",
        "--format",
        "csv",
        "--deterministic",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let last = text.lines().last().unwrap();
    let (k, value) = last.split_once(',').unwrap();
    assert_eq!(k, "40");
    let value: f64 = value.parse().unwrap();
    assert!((value - 0.45292).abs() < 1e-4);
    assert_eq!(text.lines().count(), 1 + 39);
}

#[test]
fn exact_a_jt_reproduces_table() {
    let out = googol(&[
        "exact",
        "--op",
        "a_jt",
        "--t",
        "tstar",
        "--j",
        "3..10",
        "--format",
        "csv",
        "--deterministic",
    ]);
    assert!(out.status.success());
    let expected = [
        0.705194, 0.696462, 0.65704, 0.607906, 0.556898, 0.50734, 0.460684, 0.417513,
    ];
    for (line, want) in stdout(&out).lines().skip(1).zip(expected) {
        let got: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!((got - want).abs() < 1e-5, "{line}");
    }
}

#[test]
fn exact_full_stop_is_half() {
    let out = googol(&[
        "exact",
        "--op",
        "p_algf_stop",
        "--k",
        "5",
        "--format",
        "csv",
        "--deterministic",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().last().unwrap(), "5,0.5");
}

#[test]
fn exact_rational_backend_emits_fractions() {
    let out = googol(&[
        "exact",
        "--op",
        "g",
        "--k",
        "3",
        "--backend",
        "rational",
        "--format",
        "csv",
        "--deterministic",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().last().unwrap(), "3,11/16");
}

#[test]
fn exact_rejects_unknown_op_and_bad_range() {
    assert_eq!(
        googol(&["exact", "--op", "nope", "--k", "2"]).status.code(),
        Some(3)
    );
    assert_eq!(
        googol(&["exact", "--op", "F", "--k", "9..2"]).status.code(),
        Some(3)
    );
    assert_eq!(googol(&["exact", "--op", "F"]).status.code(), Some(3));
    assert_eq!(
        googol(&[
            "exact",
            "--op",
            "a_jt",
            "--t",
            "tstar",
            "--backend",
            "rational",
            "--j",
            "3"
        ])
        .status
        .code(),
        Some(3)
    );
}

#[test]
fn oracle_emits_exact_rationals() {
    let path = write_instance("two-cards", r#"{"pairs": [[4,3],[2,1]]}"#);
    let out = googol(&[
        "oracle",
        "--instance",
        path.to_str().unwrap(),
        "--alg",
        "closed",
        "--deterministic",
    ]);
    assert!(out.status.success());
    let body: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(body["mass"]["Y1"], "1/2");
    assert_eq!(body["mass"]["NO_STOP"], "1/2");
    assert_eq!(body["ratio"], "4/7");
    std::fs::remove_file(path).ok();
}

#[test]
fn oracle_rejects_oversized_instance() {
    let pairs: Vec<String> = (1..=7)
        .map(|c| format!("[{}, {}]", 2 * c, 2 * c - 1))
        .collect();
    let path = write_instance(
        "oversize",
        &format!(r#"{{"pairs": [{}]}}"#, pairs.join(",")),
    );
    let out = googol(&[
        "oracle",
        "--instance",
        path.to_str().unwrap(),
        "--alg",
        "open",
    ]);
    assert_eq!(out.status.code(), Some(4));
    std::fs::remove_file(path).ok();
}

#[test]
fn bad_instance_and_bad_alg_exit_codes() {
    let dup = write_instance("dup", r#"{"pairs": [[1,1]]}"#);
    assert_eq!(
        googol(&[
            "oracle",
            "--instance",
            dup.to_str().unwrap(),
            "--alg",
            "open"
        ])
        .status
        .code(),
        Some(2)
    );
    std::fs::remove_file(dup).ok();
    assert_eq!(
        googol(&[
            "simulate",
            "--preset",
            "closed-bad",
            "--alg",
            "bogus",
            "--trials",
            "10"
        ])
        .status
        .code(),
        Some(3)
    );
    assert_eq!(
        googol(&["simulate", "--preset", "no-such", "--alg", "open", "--trials", "10"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        googol(&["oracle", "--instance", "/nonexistent.json", "--alg", "open"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn simulate_deterministic_reruns_are_byte_identical() {
    let args = [
        "simulate",
        "--preset",
        "closed-bad",
        "--eps",
        "1e-3",
        "--alg",
        "mixture:0.2704",
        "--trials",
        "50000",
        "--seed",
        "7",
        "--deterministic",
    ];
    let a = googol(&args);
    let b = googol(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let body: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert!(body.get("timestamp").is_none());
    let total: f64 = body["frequencies"]
        .as_object()
        .unwrap()
        .values()
        .map(|v| v.as_f64().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-12);
    // Without --deterministic a timestamp appears.
    let c = googol(&args[..args.len() - 1]);
    let body: serde_json::Value = serde_json::from_str(&stdout(&c)).unwrap();
    assert!(body.get("timestamp").is_some());
}

#[test]
fn simulate_window_algorithm_and_large_k_preset() {
    let out = googol(&[
        "simulate",
        "--preset",
        "large-k:6,8",
        "--alg",
        "window:0.1128904",
        "--trials",
        "50000",
        "--seed",
        "3",
        "--format",
        "csv",
        "--deterministic",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("outcome,frequency,ci_halfwidth"));
    // 2n + 1 outcome rows.
    assert_eq!(text.lines().count(), 1 + 17);
}

#[test]
fn simulate_writes_output_file() {
    let path = std::env::temp_dir().join(format!("googol-out-{}.json", std::process::id()));
    let out = googol(&[
        "simulate",
        "--preset",
        "open-bad",
        "--alg",
        "open",
        "--trials",
        "20000",
        "--seed",
        "1",
        "--deterministic",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let body: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(body["algorithm"], "open");
    std::fs::remove_file(path).ok();
}

#[test]
fn verify_dominance_counterexample_exits_one() {
    let out = googol(&["verify", "--suite", "dominance", "--r", "0", "--kmax", "10"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("FAIL"));
    assert!(text.contains("k=2"), "{text}");
}

#[test]
fn verify_fast_suites_pass() {
    for suite in ["secretary", "tstar", "largek", "inequalities", "adversarial"] {
        let out = googol(&["verify", "--suite", suite]);
        assert_eq!(out.status.code(), Some(0), "{suite}: {}", stdout(&out));
        assert!(stdout(&out).contains("PASS"));
    }
    assert_eq!(
        googol(&["verify", "--suite", "no-such"]).status.code(),
        Some(3)
    );
}

#[test]
fn verify_all_passes_and_writes_report() {
    let path = std::env::temp_dir().join(format!("googol-verify-{}.json", std::process::id()));
    let out = googol(&[
        "verify",
        "--suite",
        "all",
        "--tol",
        "1e-12",
        "--deterministic",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert_eq!(text.matches("PASS").count(), 7);
    let body: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(body["suites"].as_array().unwrap().len(), 7);
    std::fs::remove_file(path).ok();
}
