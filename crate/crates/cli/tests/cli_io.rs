//! Command-line behavior: exit codes, deterministic reports, pair-file
//! emission, and the committed perturbed example.

use std::path::PathBuf;
use std::process::{Command, Output};

use so3oper_core::{perturbed_pair, read_pair, write_pair, Scalar};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_so3oper")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn data_file(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn temp_file(tag: &str) -> PathBuf {
    std::env::temp_dir().join(format!("so3oper-cli-io-{tag}-{}.txt", std::process::id()))
}

#[test]
fn passing_suites_exit_zero() {
    for args in [
        vec!["canon"],
        vec!["branch", "1"],
        vec!["branch", "3"],
        vec!["roundtrip", "--sigma", "z^2"],
        vec!["roundtrip", "--sigma", "z^3/3+z"],
        vec!["roundtrip", "--sigma", "0; 0; 1"],
    ] {
        let out = run(&args);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{args:?} should pass\nstdout:\n{}\nstderr:\n{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        );
        let text = String::from_utf8_lossy(&out.stdout);
        assert!(text.trim_end().ends_with("checks passed)"), "summary line present");
    }
}

#[test]
fn perturbed_example_fails_obstruction_checks_only() {
    let path = data_file("perturbed-pair.txt");
    let out = run(&["pair-check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "perturbed pair must fail");
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("p09 FAIL"), "ledger obstruction detected");
    assert!(text.contains("p10 FAIL"), "residue obstruction detected");
    assert!(text.contains("p11 PASS"), "methods still agree");
    assert!(text.contains("p05 PASS"), "structural checks still pass");
}

#[test]
fn committed_perturbed_example_is_canonical() {
    let pair = perturbed_pair(&Scalar::int(1)).unwrap();
    let expected = write_pair(&pair, None);
    let on_disk = std::fs::read_to_string(data_file("perturbed-pair.txt")).unwrap();
    assert_eq!(on_disk, expected, "data file matches the canonical writer output");
}

#[test]
fn input_errors_exit_two() {
    let bad = temp_file("malformed");
    std::fs::write(&bad, "pair-format 1\ntwist nope\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["pair-check", bad.to_str().unwrap()],
        vec!["pair-check", "/nonexistent/so3oper-pair.txt"],
        vec!["roundtrip", "--sigma", "z^3"],
        vec!["roundtrip", "--sigma", "5"],
        vec!["roundtrip", "--sigma", "z^"],
        vec!["branch", "0"],
        vec!["branch", "-2"],
        vec!["canon", "--mutate", "zz99"],
        vec!["canon", "--order", "1"],
    ];
    for args in cases {
        let out = run(&args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?} should be an input error\nstdout:\n{}\nstderr:\n{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stderr.is_empty(), "{args:?} explains the error on stderr");
    }
    std::fs::remove_file(&bad).ok();
}

#[test]
fn json_reports_are_deterministic_and_structured() {
    let a = run(&["canon", "--json"]);
    let b = run(&["canon", "--json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout, "byte-identical reports across runs");

    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["suite"], "canon");
    assert_eq!(v["order"], 8);
    assert_eq!(v["pass"], true);
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 22);
    let ids: Vec<&str> = checks.iter().map(|c| c["id"].as_str().unwrap()).collect();
    let mut sorted = ids.clone();
    sorted.sort_unstable();
    assert_eq!(ids, sorted, "checks are sorted by id");

    let failing = run(&["branch", "1", "--json", "--mutate", "b02"]);
    assert_eq!(failing.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&failing.stdout).unwrap();
    assert_eq!(v["pass"], false);
}

#[test]
fn emitted_pair_round_trips_through_pair_check() {
    let path = temp_file("emitted");
    let out = run(&["roundtrip", "--sigma", "z^2+z^3", "--emit-pair", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "roundtrip with emission passes");

    let text = std::fs::read_to_string(&path).unwrap();
    let doc = read_pair(&text).unwrap();
    assert_eq!(write_pair(&doc.pair, doc.sigma.as_ref()), text, "byte-stable round trip");

    let check = run(&["pair-check", path.to_str().unwrap()]);
    assert_eq!(
        check.status.code(),
        Some(0),
        "emitted pair passes pair-check\nstdout:\n{}",
        String::from_utf8_lossy(&check.stdout)
    );
    std::fs::remove_file(&path).ok();
}

#[test]
fn order_flag_is_honored_in_reports() {
    let out = run(&["canon", "--order", "6", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["order"], 6);
}
