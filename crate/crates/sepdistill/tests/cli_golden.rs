//! Golden-file tests for the command-line interface: every representative
//! invocation must reproduce its frozen output byte for byte, and exit
//! codes must track the three-way contract (0 verdict delivered, 1 check
//! failed, 2 usage error).

use std::path::Path;
use std::process::Command;

fn run(args: &[&str]) -> (i32, Vec<u8>, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_sepdistill"))
        .args(args)
        .output()
        .expect("binary launches");
    (
        out.status.code().unwrap_or(-1),
        out.stdout,
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn golden(name: &str) -> Vec<u8> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    std::fs::read(&path).unwrap_or_else(|e| panic!("golden file {}: {e}", path.display()))
}

fn assert_golden(args: &[&str], name: &str) {
    let (code, stdout, stderr) = run(args);
    assert_eq!(code, 0, "args {args:?} stderr: {stderr}");
    let expected = golden(name);
    if stdout != expected {
        let got = String::from_utf8_lossy(&stdout);
        let want = String::from_utf8_lossy(&expected);
        for (i, (g, w)) in got.lines().zip(want.lines()).enumerate() {
            assert_eq!(g, w, "first divergence from {name} at line {}", i + 1);
        }
        panic!(
            "{name}: output length {} differs from golden length {}",
            stdout.len(),
            expected.len()
        );
    }
}

#[test]
fn verify_conditional_pair_matches_golden() {
    assert_golden(
        &["verify", "--family", "thm1-sep", "--d", "2", "--k1", "1", "--w", "0.3"],
        "verify_thm1_sep_d2.json",
    );
}

#[test]
fn verify_deterministic_pair_matches_golden() {
    assert_golden(
        &["verify", "--family", "ex-2x4", "--d", "2"],
        "verify_ex_2x4.json",
    );
}

#[test]
fn construct_matches_golden() {
    assert_golden(
        &["construct", "--family", "thm1-sep", "--d", "2", "--k1", "1", "--w", "0.3"],
        "construct_thm1_sep_d2.json",
    );
}

#[test]
fn protocol_matches_golden() {
    assert_golden(
        &["protocol", "--family", "three-qubit", "--d", "2", "--w", "0.7"],
        "protocol_three_qubit.json",
    );
}

#[test]
fn pencil_matches_golden() {
    assert_golden(
        &["pencil", "--family", "bell-mix", "--d", "2", "--samples", "256", "--seed", "11"],
        "pencil_bell_mix.json",
    );
}

#[test]
fn bounds_matches_golden() {
    assert_golden(
        &["bounds", "--kind", "bipartite-sep", "--dims", "2,3", "--d", "2"],
        "bounds_2x3.json",
    );
}

#[test]
fn search_matches_golden() {
    assert_golden(
        &[
            "search", "--family", "bell-mix", "--d", "2", "--t", "2", "--restarts", "2",
            "--max-iters", "120", "--seed", "7",
        ],
        "search_bell_mix.json",
    );
}

#[test]
fn sweep_csv_matches_golden() {
    assert_golden(
        &["sweep", "--family", "ex-2x4", "--d-max", "2", "--format", "csv"],
        "sweep_ex_2x4.csv",
    );
}

#[test]
fn search_reruns_are_byte_identical() {
    let args = [
        "search", "--family", "bell-mix", "--d", "2", "--t", "3", "--restarts", "3",
        "--max-iters", "90", "--seed", "13",
    ];
    let (code1, out1, _) = run(&args);
    let (code2, out2, _) = run(&args);
    assert_eq!(code1, 0);
    assert_eq!(code2, 0);
    assert_eq!(out1, out2, "same seed must reproduce identical bytes");
}

#[test]
fn exit_codes_follow_the_contract() {
    // Unknown family is a usage error.
    let (code, _, stderr) = run(&["verify", "--family", "nope", "--d", "2"]);
    assert_eq!(code, 2, "stderr: {stderr}");

    // Mixing weight outside (0, 1) is a usage error.
    let (code, _, _) = run(&["verify", "--family", "thm1-sep", "--d", "2", "--w", "1.5"]);
    assert_eq!(code, 2);

    // An impossibly tight kernel tolerance turns rounding-level fidelity
    // shortfalls into a failed check: the report is still printed but the
    // process signals the failure.
    let (code, stdout, _) = run(&[
        "verify", "--family", "thm1-sep", "--d", "2", "--kernel-tol", "1e-30",
    ]);
    assert_eq!(code, 1);
    let text = String::from_utf8_lossy(&stdout);
    assert!(text.contains("\"FAILED\""), "got: {text}");

    // An unsatisfied bound is a delivered verdict, not a failure.
    let (code, stdout, _) = run(&["bounds", "--kind", "bipartite-sep", "--dims", "2,2", "--d", "2"]);
    assert_eq!(code, 0);
    assert!(String::from_utf8_lossy(&stdout).contains("\"satisfied\": false"));

    // Help is a clean exit.
    let (code, _, _) = run(&["--help"]);
    assert_eq!(code, 0);
}
