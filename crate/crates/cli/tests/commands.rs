use std::process::Command;

use abscope::FieldSpec;
use abscope_cli::{emit_report, parse_checks, run_command, scan_range, Format, ScanRecord};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("abscope").chain(args.iter().copied());
    let code = run_command(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn gold_check_m5_d13() {
    let (code, out, _) = run(&["gold-check", "--m", "5", "--d", "13", "--format", "json"]);
    assert_eq!(code, 0);
    let records: Vec<ScanRecord> = serde_json::from_str(&out).unwrap();
    let r = &records[0];
    assert_eq!(r.d, 13);
    assert_eq!(r.canonical_d, 11);
    assert_eq!(r.ab_flag, Some(true));
    assert_eq!(r.gold_flag, Some(false));
    assert_eq!(r.three_value_flag, Some(false));
    assert_eq!(r.trace_identity_flag, Some(false));
}

#[test]
fn witness_worked_example() {
    let (code, out, _) = run(&["witness", "--m", "23", "--d", "166549", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["witness_bits"], "00000000000101010010101");
    assert_eq!(v["path"], "line4");
    assert_eq!(v["verified"], true);
}

#[test]
fn verify_all_m5_passes() {
    let (code, out, _) = run(&["verify-all", "--m", "5"]);
    assert_eq!(code, 0, "{out}");
    assert!(!out.contains("FAIL"));
}

#[test]
fn argument_errors_exit_1() {
    assert_eq!(run(&["frobnicate"]).0, 1);
    assert_eq!(run(&["field"]).0, 1);
    assert_eq!(run(&["field", "--m", "5", "--format", "xml"]).0, 1);
    assert_eq!(run(&["field", "--m", "29"]).0, 1);
    assert_eq!(run(&["field", "--m", "5", "--poly", "0x3f"]).0, 1);
    assert_eq!(run(&["ab-scan", "--m", "5", "--checks", "nope"]).0, 1);
    assert_eq!(run(&["ab-scan", "--m", "5", "--d-range", "31..40"]).0, 1);
    assert_eq!(run(&["crosscorr", "--m", "4", "--d", "3"]).0, 1);
    assert_eq!(run(&["witness", "--m", "5", "--d", "3"]).0, 1);
    assert_eq!(run(&["verify-all", "--m", "5", "--checks", "bogus"]).0, 1);
    let (code, _, err) = run(&["frobnicate"]);
    assert_eq!(code, 1);
    assert!(err.contains("unknown command"));
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(run(&["--help"]).0, 0);
    assert_eq!(run(&["--version"]).0, 0);
}

#[test]
fn field_report() {
    let (code, out, _) = run(&["field", "--m", "5", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["modulus"], "0x25");
    assert_eq!(v["order"], 31);
    let (code, out, _) = run(&["field", "--m", "5", "--poly", "0x3d", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().nth(1).unwrap().split(',').nth(1), Some("0x3d"));
}

#[test]
fn spectrum_and_intersections() {
    let (code, out, _) = run(&["spectrum", "--m", "3", "--d", "3", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("gamma,coefficient"));
    assert_eq!(out.lines().count(), 9);
    let (code, out, _) = run(&["intersections", "--m", "3", "--d", "3", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v[0]["family"], "hyperplanes");
    assert_eq!(v[0]["counts"]["1"], 3);
}

#[test]
fn crosscorr_csv() {
    let (code, out, _) = run(&["crosscorr", "--m", "3", "--d", "3", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("t,value"));
    assert_eq!(out.lines().count(), 8);
}

#[test]
fn scan_output_is_independent_of_jobs() {
    let a = run(&[
        "ab-scan", "--m", "7", "--checks", "all", "--jobs", "1", "--format", "json",
    ]);
    let b = run(&[
        "ab-scan", "--m", "7", "--checks", "all", "--jobs", "8", "--format", "json",
    ]);
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
}

#[test]
fn scan_m5_ab_representatives() {
    let spec = FieldSpec::new(5).unwrap();
    let checks = parse_checks("ab,gold").unwrap();
    let records = scan_range(&spec, None, &checks, 2).unwrap();
    let ab: Vec<u64> = records
        .iter()
        .filter(|r| r.ab_flag == Some(true))
        .map(|r| r.canonical_d)
        .collect();
    // 11 is the canonical member of the class of 13
    assert_eq!(ab, vec![3, 5, 7, 11]);
    let gold: Vec<u64> = records
        .iter()
        .filter(|r| r.gold_flag == Some(true))
        .map(|r| r.d)
        .collect();
    assert_eq!(gold, vec![3, 5]);
}

#[test]
fn scan_m7_trace_identity() {
    let spec = FieldSpec::new(7).unwrap();
    let checks = parse_checks("trace-identity").unwrap();
    let records = scan_range(&spec, None, &checks, 0).unwrap();
    let holds: Vec<u64> = records
        .iter()
        .filter(|r| r.trace_identity_flag == Some(true))
        .map(|r| r.d)
        .collect();
    assert_eq!(holds, vec![3, 5, 9]);
}

#[test]
fn scan_records_are_consistent() {
    for m in [5, 7, 9] {
        let spec = FieldSpec::new(m).unwrap();
        let records = scan_range(&spec, None, &parse_checks("all").unwrap(), 0).unwrap();
        for r in &records {
            assert!(r.inconsistencies().is_empty(), "m={m} d={}", r.d);
        }
    }
}

#[test]
fn json_round_trip_is_byte_identical() {
    let spec = FieldSpec::new(7).unwrap();
    let records = scan_range(&spec, Some(1..=60), &parse_checks("all").unwrap(), 0).unwrap();
    let first = emit_report(&records, Format::Json).unwrap();
    let parsed: Vec<ScanRecord> = serde_json::from_str(&first).unwrap();
    assert_eq!(parsed.len(), records.len());
    assert_eq!(emit_report(&parsed, Format::Json).unwrap(), first);
}

#[test]
fn csv_has_header_plus_one_row_per_record() {
    let spec = FieldSpec::new(5).unwrap();
    let records = scan_range(&spec, Some(13..=13), &parse_checks("ab").unwrap(), 0).unwrap();
    let csv = emit_report(&records, Format::Csv).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert_eq!(emit_report(&[], Format::Json).unwrap().trim(), "[]");
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_abscope");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(status(&["verify-all", "--m", "3"]), Some(0));
    assert_eq!(status(&["nonsense"]), Some(1));
    assert_eq!(status(&["field", "--m", "5", "--jobs", "x"]), Some(1));
}

#[test]
fn max_m_override() {
    let bin = env!("CARGO_BIN_EXE_abscope");
    let out = Command::new(bin)
        .args(["field", "--m", "6"])
        .env("ABSCOPE_MAX_M", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = Command::new(bin)
        .args(["field", "--m", "30", "--format", "json"])
        .env("ABSCOPE_MAX_M", "30")
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
