use serde_json::Value;
use std::io::Write;
use std::process::{Command, Output};

fn embnum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_embnum")).args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = embnum(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn matrix_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn json_records_round_trip() {
    for args in [
        &["lens", "13", "12"][..],
        &["brieskorn", "2", "3", "7", "--d-zero"],
        &["surgery", "-7", "1"],
        &["dbc", "--genus", "1", "--unknotting", "1"],
        &["split", "yn", "2"],
        &["lens-table", "--max", "9"],
    ] {
        let mut a = args.to_vec();
        a.extend(["--format", "json"]);
        let v: Value = serde_json::from_str(&stdout(&a)).unwrap();
        let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        assert_eq!(v, again);
        assert!(v.as_array().is_some_and(|a| !a.is_empty()), "{args:?}");
    }
}

#[test]
fn text_and_json_agree() {
    for (args, text_value) in [
        (&["lens", "7", "2"][..], "exact 2"),
        (&["brieskorn", "2", "3", "5"], "exact 8"),
        (&["split", "yn", "1", "--assume-11-8"], "exact 6"),
    ] {
        let text = stdout(args);
        assert!(text.contains(text_value), "{args:?}: {text}");
        let mut a = args.to_vec();
        a.extend(["--format", "json"]);
        let v: Value = serde_json::from_str(&stdout(&a)).unwrap();
        let n: u64 = text_value.trim_start_matches("exact ").parse().unwrap();
        assert_eq!(v[0]["lower"], n);
        assert_eq!(v[0]["upper"], n);
    }
}

#[test]
fn csv_records_have_header() {
    let text = stdout(&["lens-table", "--max", "7", "--format", "csv"]);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    assert!(headers.iter().any(|h| h == "manifold"));
    assert!(reader.records().count() > 5);
}

#[test]
fn form_from_file() {
    let f = matrix_file(r#"{"n": 2, "rows": [[0, 1], [1, 0]]}"#);
    let v: Value = serde_json::from_str(&stdout(&["form", "--file", f.path().to_str().unwrap(), "--format", "json"])).unwrap();
    assert_eq!(v["rank"], 2);
    assert_eq!(v["signature"], 0);
    assert_eq!(v["determinant"], "-1");
    assert_eq!(v["classification"], "H");
}

#[test]
fn malformed_input_exits_2() {
    for bad in [r#"{"n": 2, "rows": [[0, 1], [2, 0]]}"#, r#"{"n": 3, "rows": [[1]]}"#, "not json"] {
        let f = matrix_file(bad);
        let out = embnum(&["form", "--file", f.path().to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{bad}");
    }
    assert_eq!(embnum(&["lens", "6", "4"]).status.code(), Some(2));
    assert_eq!(embnum(&["brieskorn", "2", "4", "5"]).status.code(), Some(2));
    assert_eq!(embnum(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(embnum(&["split", "yn", "0"]).status.code(), Some(2));
}

#[test]
fn limit_output() {
    let text = stdout(&["limit", "--assume-11-8"]);
    assert!(text.contains("3/19") && text.contains("5/19"), "{text}");
}
