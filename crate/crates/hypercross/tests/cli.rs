use std::fs;
use std::path::Path;

use hypercross::cli::run;
use serde_json::Value;

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn call(args: &[&str]) -> i32 {
    run(std::iter::once("hypercross").chain(args.iter().copied()))
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn summability_verdicts_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let half = write(dir.path(), "half.json", r#"{"head":[0.25,0.25]}"#);
    let big = write(dir.path(), "big.json", r#"{"head":[0.7,0.5],"tail":{"kind":"power","kappa":0.0625,"q":3}}"#);
    let out = dir.path().join("v.json");
    let o = out.to_str().unwrap();
    assert_eq!(call(&["summability", "--p", "2", "--seq", &half, "--out", o]), 0);
    let v = read_json(&out);
    assert_eq!(v["verdict"], "Summable");
    let sum = v["sum"].as_array().unwrap();
    assert!(sum[0].as_f64().unwrap() <= sum[1].as_f64().unwrap());
    assert_eq!(call(&["summability", "--p", "0.5", "--seq", &big, "--out", o]), 2);
    assert_eq!(read_json(&out)["verdict"], "NotSummable");
}

#[test]
fn card_and_epsdim_report_the_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let seq = write(dir.path(), "b.json", r#"{"head":[0.5]}"#);
    let out = dir.path().join("c.json");
    let o = out.to_str().unwrap();
    assert_eq!(call(&["card", "--a", "1", "--m", "1", "--T", "8", "--seq", &seq, "--out", o]), 0);
    let v = read_json(&out);
    assert_eq!(v["exact"], 30);
    assert_eq!(v["lower"], 14.0);
    assert!((v["upper"].as_f64().unwrap() - 72.0).abs() < 1e-6);
    assert_eq!(
        call(&["epsdim", "--alpha", "2", "--beta", "1", "--m", "1", "--eps", "0.125", "--seq", &seq, "--out", o]),
        0
    );
    let v = read_json(&out);
    assert_eq!((v["lower"].as_u64(), v["upper"].as_u64()), (Some(29), Some(30)));
}

#[test]
fn materialize_writes_one_pair_per_line() {
    let dir = tempfile::tempdir().unwrap();
    let seq = write(dir.path(), "b.json", r#"{"head":[0.5]}"#);
    let out = dir.path().join("e.jsonl");
    assert_eq!(
        call(&["materialize", "--a", "1", "--m", "1", "--T", "8", "--seq", &seq, "--out", out.to_str().unwrap()]),
        0
    );
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 30);
    assert_eq!(lines[0]["s"], serde_json::json!({}));
    assert!(lines.iter().any(|l| l["s"] == serde_json::json!({"1": 3})));
}

#[test]
fn project_check_reads_a_field() {
    let dir = tempfile::tempdir().unwrap();
    let seq = write(dir.path(), "b.json", r#"{"head":[0.5]}"#);
    let field = write(
        dir.path(),
        "v.jsonl",
        "{\"k\":[3],\"s\":{},\"value\":1.0}\n{\"k\":[-1],\"s\":{\"1\":2},\"value\":0.5}\n",
    );
    let out = dir.path().join("p.json");
    let args = ["project-check", "--field", &field, "--T", "2", "--alpha", "2", "--beta", "1", "--seq", &seq];
    let code = call(&[&args[..], &["--out", out.to_str().unwrap()]].concat());
    assert_eq!(code, 0);
    let v = read_json(&out);
    assert!(v["lhs"].as_f64().unwrap() <= v["rhs"].as_f64().unwrap());
}

#[test]
fn spatial_study_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "p.json",
        r#"{"m":1,"abar":{"constant":1},"f":{"cos":[{"k":[1],"amp":1},{"k":[3],"amp":0.5}]},"r":1,"R":1}"#,
    );
    let csv = dir.path().join("t.csv");
    let summary = dir.path().join("s.json");
    let code = call(&[
        "--threads",
        "2",
        "spatial-study",
        "--spec",
        &spec,
        "--Ts",
        "1,2,4",
        "--modes",
        "16",
        "--out",
        csv.to_str().unwrap(),
        "--summary",
        summary.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("T,n,error_V,bound,slope_so_far"));
    assert_eq!(lines.count(), 3);
    assert_eq!(read_json(&summary)["bounds_hold"], true);
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(call(&["card", "--a", "1"]), 1);
    assert_eq!(call(&["no-such-command"]), 1);
    assert_eq!(call(&["summability", "--p", "2", "--seq", "/nonexistent/b.json"]), 1);
}

#[test]
fn parametric_commands_on_a_small_problem() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "p.json",
        r#"{"m":1,"abar":{"constant":1},"psi":[{"cos":[{"k":[1],"amp":0.05}]}],
            "f":{"cos":[{"k":[1],"amp":1},{"k":[2],"amp":0.5}]},"r":0.9,"R":1.1}"#,
    );
    let out = dir.path().join("d.json");
    assert_eq!(
        call(&["decay-check", "--spec", &spec, "--degree", "2", "--modes", "16", "--out", out.to_str().unwrap()]),
        0
    );
    let v = read_json(&out);
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    assert_eq!(v["all_within"], true);
    let csv = dir.path().join("t.csv");
    let summary = dir.path().join("s.json");
    let code = call(&[
        "pde-study",
        "--spec",
        &spec,
        "--Ts",
        "2,4",
        "--modes",
        "16",
        "--out",
        csv.to_str().unwrap(),
        "--summary",
        summary.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 3);
    assert_eq!(read_json(&summary)["bounds_hold"], true);
}
