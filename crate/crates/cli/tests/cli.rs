use std::path::PathBuf;
use std::process::{Command, Output};

use parahoric_core::descent::CGReport;
use parahoric_core::factorization::DecompositionWitness;
use parahoric_core::picard::GroupDatum;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_parahoric"))
        .args(args)
        .output()
        .expect("spawn parahoric")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(name: &str, body: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, body).unwrap();
    path
}

const IWAHORI_S3: &str = r#"{
  "schema": 1,
  "genus": 0,
  "group": "S3",
  "points": [
    {"label": "p", "type": "D4~2", "facet": [0, 1, 2, 3], "monodromy": "(12)", "bad": true},
    {"label": "q", "type": "D4~2", "facet": [0, 1, 2, 3], "monodromy": "(23)", "bad": true},
    {"label": "r", "type": "D4~3", "facet": [0, 1, 2], "monodromy": "(132)", "bad": true}
  ]
}"#;

const A2_TWO_SPECIAL: &str = r#"{
  "genus": 0,
  "group": "C2",
  "points": [
    {"label": "x", "type": "A2~2", "facet": [1], "monodromy": "(12)", "bad": true},
    {"label": "y", "type": "A2~2", "facet": [1], "monodromy": "(12)", "bad": true}
  ]
}"#;

#[test]
fn dynkin_info_twisted_a2() {
    let o = run(&["dynkin", "info", "A2~2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("dual labels   1,2"));

    let o = run(&["--json", "dynkin", "info", "A2~2"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["dual_labels"], serde_json::json!([1, 2]));
    assert_eq!(v["cartan"], serde_json::json!([[2, -4], [-1, 2]]));
}

#[test]
fn reduce_case3_is_one_factor() {
    let o = run(&["--json", "reduce", "s3", "(12),(23),(132)"]);
    assert!(o.status.success());
    let w: DecompositionWitness = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(w.factors.len(), 1);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["factors"][0]["kind"], "S3Case3");
}

#[test]
fn cg_iwahori_gsd6_is_exact_one() {
    let d = write("iwahori_s3.json", IWAHORI_S3);
    let o = run(&["--json", "cg", "--datum", d.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["exact"], 1);
}

#[test]
fn cg_two_special_points() {
    let d = write("a2_special.json", A2_TWO_SPECIAL);
    let o = run(&["cg", "--datum", d.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("exact      2"));
}

#[test]
fn json_round_trips_and_is_stable() {
    let d = write("iwahori_rt.json", IWAHORI_S3);
    let args = ["--json", "cg", "--datum", d.to_str().unwrap()];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);

    let report: CGReport = serde_json::from_slice(&a.stdout).unwrap();
    let again = serde_json::to_value(&report).unwrap();
    let mut orig: Value = serde_json::from_slice(&a.stdout).unwrap();
    let obj = orig.as_object_mut().unwrap();
    obj.remove("schema");
    obj.remove("command");
    assert_eq!(orig, again);

    // The datum itself survives a serialize/parse cycle.
    let datum = GroupDatum::from_json(IWAHORI_S3).unwrap();
    assert_eq!(GroupDatum::from_json(&datum.to_json()).unwrap(), datum);
}

#[test]
fn verlinde_ranks() {
    let o = run(&["verlinde", "rank", "(12),(23),(123),(123)"]);
    assert_eq!(stdout(&o), "rank 2\n");
    let o = run(&["verlinde", "closed-form", "1", "2", "3"]);
    assert_eq!(stdout(&o), "rank 18\n");
}

#[test]
fn covers_commands() {
    let o = run(&["covers", "genus", "--tuple", "(12),(23),(123),(123)"]);
    assert_eq!(stdout(&o), "genus 2\ncomponents 1\n");
    let o = run(&["covers", "connected", "--tuple", "(12),(12)"]);
    assert_eq!(stdout(&o), "connected false\n");
    let o = run(&[
        "--json",
        "covers",
        "enumerate",
        "--classes",
        "(12),(12),(123)",
        "--connected",
    ]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["count"], 6);
}

#[test]
fn domain_errors_exit_one_and_name_the_field() {
    let o = run(&["reduce", "s3", "(12),(13)"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("tuple"));

    let d = write("bad_field.json", r#"{"genus":0,"group":"C2","points":[],"extra":1}"#);
    let o = run(&["picard", "rank", "--datum", d.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("--datum") && err.contains("extra"), "{err}");
}

#[test]
fn parse_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["verlinde", "closed-form", "x", "1", "2"]).status.code(), Some(2));
}
