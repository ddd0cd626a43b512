use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn keller(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_keller"))
        .args(args)
        .output()
        .expect("keller runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn put(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const TRIANGULAR: &str = "vars x1 x2\nF1 = x1 + x2^2\nF2 = x2\n";

#[test]
fn invert_triangular_map() {
    let dir = TempDir::new().unwrap();
    let m = put(&dir, "m.txt", TRIANGULAR);
    let out = keller(&["invert", s(&m)]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("inverse: x1 - x2^2, x2"), "{}", stdout(&out));

    for method in ["formal", "pairing", "nilpotent"] {
        let out = keller(&["invert", s(&m), "--method", method, "--json"]);
        assert_eq!(code(&out), 0, "{method}");
        let v = json_of(&out);
        assert_eq!(v["results"]["inverse"], serde_json::json!(["x1 - x2^2", "x2"]));
        assert_eq!(v["results"]["certified"], Value::Bool(true));
    }
}

#[test]
fn invert_rank_one_normal_form() {
    let dir = TempDir::new().unwrap();
    let m = put(&dir, "m.txt", "vars x1 x2\nF1 = x1\nF2 = 2*x2 + x1^2\n");
    let out = keller(&["invert", s(&m), "--method", "rank1", "--json"]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    assert_eq!(v["results"]["inverse"], serde_json::json!(["x1", "1/2*x2 - 1/2*x1^2"]));
}

#[test]
fn non_invertible_within_bound_is_negative() {
    let dir = TempDir::new().unwrap();
    // det JF = 1 - 4*x1*x2, not Keller
    let m = put(&dir, "m.txt", "vars x1 x2\nF1 = x1 + x2^2\nF2 = x2 + x1^2\n");
    let out = keller(&["invert", s(&m), "--bound", "4", "--json"]);
    assert_eq!(code(&out), 1);
    let v = json_of(&out);
    assert_eq!(v["status"], "negative");
    assert_eq!(v["results"]["verdict"], "not_invertible_within_bound");
}

#[test]
fn minors_on_identity_find_a_witness() {
    let dir = TempDir::new().unwrap();
    let m = put(&dir, "id.txt", "2\n1 0\n0 1\n");
    assert_eq!(code(&keller(&["minors", s(&m), "--lo", "2", "--hi", "2"])), 1);
    let n = put(&dir, "n.txt", "3\n2 2 2\n0 1 0\n0 0 1\n0 0 0\n");
    assert_eq!(code(&keller(&["minors", s(&n), "--lo", "2", "--hi", "3"])), 0);
}

#[test]
fn casebook_furter() {
    let out = keller(&["casebook", "run", "--filter", "furter"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("PASS furter"));
    assert_eq!(code(&keller(&["casebook", "run", "--filter", "no-such-scenario"])), 2);
}

#[test]
fn check_round_trip() {
    let dir = TempDir::new().unwrap();
    let m = put(&dir, "m.txt", "vars a b\n# comment\nF2 = b\nF1 = a + (b + 1)^2 - 2*b - 1\n");
    let out = keller(&["check", s(&m), "--json"]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    assert_eq!(v["results"]["round_trip"], Value::Bool(true));
    assert_eq!(v["results"]["keller"], Value::Bool(true));
    let rendered: Vec<String> = serde_json::from_value(v["results"]["rendered"].clone()).unwrap();
    let text = format!("vars a b\nF1 = {}\nF2 = {}\n", rendered[0], rendered[1]);
    let again = put(&dir, "again.txt", &text);
    let v2 = json_of(&keller(&["check", s(&again), "--json"]));
    assert_eq!(v2["results"]["rendered"], v["results"]["rendered"]);
}

#[test]
fn input_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad = put(&dir, "bad.txt", "vars x1\nF1 = x1 + y\n");
    let out = keller(&["check", s(&bad)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2, column 11"));
    assert_eq!(code(&keller(&["check", "/nonexistent/map.txt"])), 2);
    assert_eq!(code(&keller(&["frobnicate"])), 2);
    let m = put(&dir, "m.txt", TRIANGULAR);
    assert_eq!(code(&keller(&["gz-reduce", s(&m), "--r", "5"])), 2);
    assert_eq!(code(&keller(&["lines", s(&m), "--a", "1", "--lambda", "2"])), 2);
}

#[test]
fn report_keys_and_out_file() {
    let dir = TempDir::new().unwrap();
    let m = put(&dir, "m.txt", TRIANGULAR);
    let report = dir.path().join("report.json");
    let out = keller(&["invert", s(&m), "--out", s(&report)]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["command", "inputs", "message", "results", "status"]);
    assert_eq!(v["command"], "invert");
    assert_eq!(v["status"], "ok");
    assert_eq!(v["inputs"]["method"], "formal");
    assert!(v["results"]["degree_table"]["checks"].is_array());
}

#[test]
fn lift_save_then_extend() {
    let dir = TempDir::new().unwrap();
    let m = put(&dir, "m.txt", TRIANGULAR);
    let pair = dir.path().join("pair");
    let out = keller(&["gz-lift", s(&m), "--save", s(&pair), "--json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json_of(&out)["results"]["status"], "strong");
    for f in ["f.txt", "F.txt", "B.txt", "C.txt"] {
        assert!(pair.join(f).exists(), "{f}");
    }
    let out = keller(&["extend", s(&pair), "--i", "1", "--d", "3", "--json"]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    assert_eq!(v["results"]["n"], 4);
    assert!(v["results"]["status"].as_str().unwrap() != "invalid");

    // breaking the pair makes extension a negative verdict
    fs::write(pair.join("B.txt"), "2 3\n1 0 0\n0 1 1\n").unwrap();
    assert_eq!(code(&keller(&["extend", s(&pair), "--i", "1", "--d", "2"])), 1);
}

#[test]
fn reduce_power_linear_map() {
    let dir = TempDir::new().unwrap();
    // F = X + (x1 + x2 - x3)^2 * (1, 0, 1)
    let m = put(
        &dir,
        "m.txt",
        "vars x1 x2 x3\nF1 = x1 + (x1 + x2 - x3)^2\nF2 = x2\nF3 = x3 + (x1 + x2 - x3)^2\n",
    );
    let out = keller(&["gz-reduce", s(&m), "--r", "1", "--json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json_of(&out)["results"]["r"], 1);
}

#[test]
fn lines_agree_on_planted_instance() {
    let dir = TempDir::new().unwrap();
    let m = put(&dir, "m.txt", "vars x1 x2\nF1 = x1 + x1^2\nF2 = x2\n");
    // a = -1/(1 + λ) with λ = 1/2 puts a and λa in the same fibre
    let out = keller(&["lines", s(&m), "--a", "-2/3,0", "--lambda", "1/2", "--json"]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    assert_eq!(v["results"]["lhs"], Value::Bool(true));
    assert_eq!(v["results"]["rhs"], Value::Bool(true));
}
