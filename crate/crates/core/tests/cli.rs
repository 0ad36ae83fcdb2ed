use std::process::{Command, Output};

use vasyunin::cli::{CanonicalRow, CoeffRow, DivergeRow, ProfileRow, Report, VerifyRow};
use vasyunin::{build_correction, Rational, SeedFamily};

fn tool(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vasyunin"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn rat(s: &str) -> Rational {
    s.parse().unwrap()
}

#[test]
fn coeffs_round_trip() {
    let out = tool(&["coeffs", "--family", "first", "--n-max", "64"]);
    assert_eq!(out.status.code(), Some(0));
    let report: Report<CoeffRow> = serde_json::from_str(&stdout(&out)).unwrap();
    let corr = build_correction(SeedFamily::First, 64).unwrap();
    assert_eq!(report.rows.len(), 64);
    for (row, c) in report.rows.iter().zip(corr.coeffs()) {
        assert_eq!(&rat(&row.c_recurrence), c);
        assert_eq!(rat(row.c_closed.as_deref().unwrap()), *c);
        assert_eq!(row.matches, Some(true));
    }
    let again = serde_json::to_string_pretty(&report).unwrap() + "\n";
    assert_eq!(again, stdout(&out));
}

#[test]
fn output_is_deterministic() {
    let args = ["diverge", "--family", "third", "--n-max", "6", "--precision", "30"];
    let a = tool(&args);
    let b = tool(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let report: Report<DivergeRow> = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(report.metadata.timestamp, None);
    assert_eq!(report.rows.iter().map(|r| r.n).collect::<Vec<_>>(), [2, 3, 4, 5, 6]);

    let stamped = tool(&[&args[..], &["--timestamp", "2024-01-01T00:00:00Z"]].concat());
    let report: Report<DivergeRow> = serde_json::from_str(&stdout(&stamped)).unwrap();
    assert_eq!(report.metadata.timestamp.as_deref(), Some("2024-01-01T00:00:00Z"));
}

#[test]
fn diverge_fixed_cutoff_and_csv() {
    let out = tool(&["diverge", "--n-max", "4", "--x", "4096", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    assert_eq!(&headers[0], "n");
    let x = headers.iter().position(|h| h == "delta_x").unwrap();
    let rows: Vec<_> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| &r[x] == "4096"));
}

#[test]
fn diverge_json_fields() {
    let out = tool(&["diverge", "--n-max", "2", "--x-policy", "default", "--precision", "20"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let row = &v["rows"][0];
    assert_eq!(row["n"], 2);
    assert_eq!(row["delta_l1"]["x"], 8192);
    assert_eq!(row["I_n"]["closed_form"], "3/2*ln(2) - 1");
    assert_eq!(v["metadata"]["parameters"]["x_policy"], "n*2^12");
    assert_eq!(v["metadata"]["summary"]["non_cauchy"], true);
}

#[test]
fn profile_and_canonical() {
    let out = tool(&["profile", "--n", "1"]);
    let report: Report<ProfileRow> = serde_json::from_str(&stdout(&out)).unwrap();
    let v: Vec<_> = report.rows.iter().map(|r| (r.m, r.v.as_str())).collect();
    assert_eq!(v, [(0, "0"), (1, "1"), (2, "0"), (3, "1")]);

    let out = tool(&["canonical", "--n", "1"]);
    let report: Report<CanonicalRow> = serde_json::from_str(&stdout(&out)).unwrap();
    let v: Vec<_> = report
        .rows
        .iter()
        .map(|r| (r.denominator, r.coefficient.as_str(), r.mobius_match))
        .collect();
    assert_eq!(v, [(1, "1", Some(true)), (2, "-2", None)]);
}

#[test]
fn verify_exit_codes() {
    let out = tool(&["verify", "--n-max", "40"]);
    assert_eq!(out.status.code(), Some(0));
    let report: Report<VerifyRow> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report.rows.len(), 10);
    assert!(report.rows.iter().all(|r| r.passed));

    let out = tool(&["verify", "--checks", "identity", "--mutate", "2=2"]);
    assert_eq!(out.status.code(), Some(1));

    let out = tool(&["verify", "--checks", ""]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("no checks run"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["diverge", "--n-max", "1"][..],
        &["coeffs"],
        &["coeffs", "--n-max", "3", "--precision", "14"],
        &["coeffs", "--n-max", "70000"],
        &["diverge", "--n-max", "3", "--x", "4096", "--x-policy", "default"],
        &["frobnicate"],
        &["verify", "--checks", "nope"],
    ] {
        assert_eq!(tool(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("vasyunin-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("coeffs.csv");
    let out = tool(&["coeffs", "--n-max", "3", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 4);
    std::fs::remove_dir_all(&dir).unwrap();
}
