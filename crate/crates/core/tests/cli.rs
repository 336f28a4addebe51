use serde_json::Value;
use std::io::Write;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frobheis")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn temp_file(name: &str, body: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("frobheis-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::File::create(&p).unwrap().write_all(body.as_bytes()).unwrap();
    p
}

#[test]
fn validate_builtins() {
    let o = run(&["validate", "clifford"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("Δ = 0") && s.contains("θ = 2"), "{s}");
    let o = run(&["validate", "trivial"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("θ = 1"));
}

#[test]
fn validate_rejects_degenerate_trace() {
    let p = temp_file(
        "zero-trace.toml",
        r#"[algebra]
name = "zero-trace"

[[basis]]
symbol = "1"
degree = 0
parity = 0

[[basis]]
symbol = "z"
degree = 2
parity = 0

[[product]]
left = "1"
right = "1"
result = [["1", "1"]]

[[product]]
left = "1"
right = "z"
result = [["1", "z"]]

[[product]]
left = "z"
right = "1"
result = [["1", "z"]]

[trace]
"#,
    );
    let o = run(&["validate", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.to_lowercase().contains("degenerate") || err.contains("trace"), "{err}");
}

#[test]
fn check_defining_suite() {
    let out = temp_file("report.json", "");
    let o = run(&["check", "--suite", "defining", "--algebra", "trivial", "--k", "-1", "--levels", "0..2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let text = serde_json::to_string_pretty(&report).unwrap();
    let again: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report, again);
    let o2 = run(&["check", "--suite", "defining", "--algebra", "trivial", "--k", "-1", "--levels", "0..2"]);
    assert_eq!(serde_json::from_slice::<Value>(&o2.stdout).unwrap(), report, "reports are reproducible");
}

#[test]
fn check_named_relations() {
    let o = run(&["check", "--relation", "braid-alternating", "--algebra", "trunc-poly-2", "--k", "-2", "--levels", "0..1"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["check", "--relation", "inf-grass3", "--t-max", "3", "--algebra", "clifford", "--k", "-1", "--levels", "0..1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("t=3"));
    let o = run(&["check", "--relation", "no-such-relation"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_at_level_zero_is_symbolic() {
    let o = run(&["check", "--relation", "doublecross-up-down", "--algebra", "trivial", "--k", "0"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("rewriting only"));
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn eval_counterclockwise_bubble() {
    let o = run(&["eval", "--k", "-1", "--macro", "ccbubble", "--params", r#"{"dots": 0, "token": {"1": "1"}}"#, "--level", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).trim_end().ends_with("[1]"), "{}", stdout(&o));
}

#[test]
fn simplify_double_crossing() {
    let p = temp_file("ss.json", r#"{"domain": "++", "slices": [{"pos": 0, "gen": "s"}, {"pos": 0, "gen": "s"}]}"#);
    let o = run(&["simplify", "--diagram", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "Normalized");
    assert_eq!(v["result"]["terms"][0]["slices"], serde_json::json!([]));
    let o = run(&["simplify", "--diagram", p.to_str().unwrap(), "--rules", "braid-up"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["steps"], 0);
}

#[test]
fn eval_closed_bubble() {
    let o = run(&["eval-closed", "--algebra", "trunc-poly-2", "--k", "1", "--macro", "cbubble", "--params", r#"{"dots": 0, "token": {"z": "3"}}"#]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("-3"), "{}", stdout(&o));
}

#[test]
fn fuzz_is_seeded() {
    let a = run(&["fuzz", "--seed", "3", "--count", "5", "--algebra", "clifford"]);
    let b = run(&["fuzz", "--seed", "3", "--count", "5", "--algebra", "clifford"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains('3'));
}

#[test]
fn rules_lists_ids() {
    let o = run(&["rules", "--algebra", "trivial", "--k", "-2"]);
    let s = stdout(&o);
    assert!(s.contains("inf-grass3") && s.contains("left-dotted-curl"));
}

#[test]
fn bad_input_is_an_error() {
    let p = temp_file("bad.json", r#"{"domain": "+", "slices": [{"pos": 0, "gen": "s"}]}"#);
    let o = run(&["simplify", "--diagram", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
