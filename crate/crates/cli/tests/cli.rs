//! CLI behavior: deterministic output, JSON round trips and exit codes.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lieopt"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn output_is_byte_identical_across_runs() {
    for args in [
        vec!["tables", "--algebra", "heat6"],
        vec!["adjoint-matrix", "--algebra", "ns4", "--format", "json"],
        vec![
            "sample-case",
            "--algebra",
            "heat6",
            "--case",
            "i",
            "--count",
            "5",
            "--seed",
            "9",
            "--format",
            "json",
        ],
        vec![
            "verify-optimal-system",
            "--algebra",
            "ns4",
            "--seed",
            "7",
            "--coverage-samples",
            "5",
            "--starts",
            "16",
        ],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a, b, "non-deterministic output for {args:?}");
        assert_eq!(a.0, 0, "stderr: {}", a.2);
    }
}

#[test]
fn json_outputs_parse_and_round_trip() {
    let (code, stdout, _) = run(&["tables", "--algebra", "ns4", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["commutator"].as_array().unwrap().len(), 4);
    assert_eq!(v["adjoint"][0].as_array().unwrap().len(), 4);

    let (code, stdout, _) = run(&[
        "sample-case",
        "--algebra",
        "ns4",
        "--case",
        "3",
        "--count",
        "3",
        "--seed",
        "11",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let pairs = v["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 3);
    // sampled pairs feed straight back into check-equivalent
    let source = serde_json::to_string(&pairs[0]).unwrap();
    let (code, stdout, _) = run(&[
        "check-equivalent",
        "--algebra",
        "ns4",
        "--source",
        &source,
        "--target",
        r#"{"a":["0","1","0","0"],"b":["1","0","0","0"]}"#,
        "--format",
        "json",
        "--seed",
        "3",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert!(v["verdict"].is_object(), "{stdout}");
}

#[test]
fn identical_pairs_give_an_equivalent_verdict() {
    let pair = r#"{"a":["0","0","0","0","0","1"],"b":["0","0","1","0","0","0"]}"#;
    let (code, stdout, _) = run(&[
        "check-equivalent",
        "--algebra",
        "heat6",
        "--source",
        pair,
        "--target",
        pair,
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("EQUIVALENT"), "{stdout}");
}

#[test]
fn exit_codes() {
    // unknown subcommand -> 2 (clap usage error)
    let (code, _, _) = run(&["no-such-command"]);
    assert_eq!(code, 2);
    // unknown algebra path -> 2
    let (code, _, stderr) = run(&["tables", "--algebra", "/does/not/exist.json"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("error"));
    // mixed lambda classes are rejected as input errors
    let (code, _, stderr) = run(&[
        "check-equivalent",
        "--algebra",
        "heat6",
        "--source",
        r#"{"a":["0","0","0","0","0","1"],"b":["0","0","1","0","0","0"]}"#,
        "--target",
        r#"{"a":["0","0","0","0","0","1"],"b":["0","0","0","1","0","0"]}"#,
    ]);
    assert_eq!(code, 2);
    assert!(stderr.contains("lambda"), "{stderr}");
    // check-invariant failure -> 1
    let (code, stdout, _) = run(&[
        "check-invariant",
        "--algebra",
        "heat6",
        "--mode",
        "zero",
        "--num",
        "a1",
        "--den",
        "1",
    ]);
    assert_eq!(code, 1);
    assert!(stdout.contains("FAIL"), "{stdout}");
    // passing residual threshold -> 0; failing -> 1
    let (code, _, _) = run(&[
        "ode-residual",
        "--ode",
        "red2",
        "--candidate",
        "red2_zero",
        "--threshold",
        "1e-6",
    ]);
    assert_eq!(code, 0);
    let (code, _, _) = run(&[
        "ns-residual",
        "--solution",
        "ns_radial",
        "--threshold",
        "1e-30",
    ]);
    assert_eq!(code, 1);
}

#[test]
fn custom_algebra_document_and_factor_order() {
    // an abelian algebra from a user document works end to end
    let dir = std::env::temp_dir().join("lieopt-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("abelian.json");
    std::fs::write(&path, r#"{"dim":3,"basis":["e1","e2","e3"],"brackets":[]}"#).unwrap();
    let (code, stdout, _) = run(&["tables", "--algebra", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.contains("e3"));

    // non-default factor order is accepted and recorded
    let (code, stdout, _) = run(&[
        "adjoint-matrix",
        "--algebra",
        "ns4",
        "--order",
        "2,1,3,4",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["order"], serde_json::json!([2, 1, 3, 4]));
    // a bad order is an input error
    let (code, _, _) = run(&["adjoint-matrix", "--algebra", "ns4", "--order", "1,1,2,3"]);
    assert_eq!(code, 2);
}

#[test]
fn non_integer_spectrum_is_surfaced() {
    let dir = std::env::temp_dir().join("lieopt-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("rotation.json");
    // ad(v1) rotates (v2, v3): eigenvalues 1 +- i
    std::fs::write(
        &path,
        r#"{"dim":3,"basis":["v1","v2","v3"],
            "brackets":[{"i":1,"j":2,"coeffs":{"2":"1","3":"-1"}},
                        {"i":1,"j":3,"coeffs":{"2":"1","3":"1"}}]}"#,
    )
    .unwrap();
    let (code, _, stderr) = run(&["tables", "--algebra", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(stderr.contains("non-integer spectrum"), "{stderr}");
}
