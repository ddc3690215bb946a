use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weyl-deform")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn ext_table_json() {
    let v = json(&["ext"]);
    assert_eq!(v["ext1"], serde_json::json!([[0, 1], [1, 0]]));
    assert_eq!(v["ext2"], serde_json::json!([[0, 0], [0, 0]]));
    assert!(v["stabilized_at"].as_u64().unwrap() <= 6);
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["ext1", "ext2", "stabilized_at"]);
}

#[test]
fn hull_relations() {
    let v = json(&["hull"]);
    assert_eq!(v["points"], 2);
    assert_eq!(v["relations"].as_array().unwrap().len(), 7);
    assert_eq!(v["entries"][0][0], "k[[s12*s21]]");
}

#[test]
fn classify_two_has_six_families() {
    let v = json(&["classify", "2"]);
    let families = v["families"].as_array().unwrap();
    assert_eq!(families.len(), 6);
    assert_eq!(families[5]["label"], "T_{2,6,a}");
    assert_eq!(families[5]["simple"], true);
    assert_eq!(families[5]["s21"], serde_json::json!([["0", "0"], ["a", "0"]]));
}

#[test]
fn classify_custom_samples() {
    let v = json(&["classify", "3", "--samples", "3,-1/3"]);
    assert_eq!(v["samples"], serde_json::json!(["3", "-1/3"]));
    assert_eq!(v["families"].as_array().unwrap().len(), 12);
}

#[test]
fn simple_by_label_and_json() {
    let v = json(&["simple", "T_2_6", "--param", "a=1"]);
    assert_eq!(v["simple"], true);
    assert_eq!(v["proper_submodule"], Value::Null);
    let rep = r#"{"e1":[["1","0"],["0","0"]],"s12":[["0","0"],["0","0"]],"s21":[["0","0"],["1","0"]]}"#;
    let v = json(&["simple", rep]);
    assert_eq!(v["simple"], false);
    assert_eq!(v["indecomposable"], true);
}

#[test]
fn specialize_half_parameter() {
    let v = json(&["specialize", "T_2_6", "--param", "a=1/2"]);
    assert_eq!(v["report"]["match"]["candidate"], "D/D(t*d - 1/2)");
    assert_eq!(v["report"]["match"]["shift"], 0);
}

#[test]
fn specialize_minus_one_gives_dt() {
    let v = json(&["specialize", "T_2_6", "--param", "a=-1"]);
    assert_eq!(v["report"]["match"]["candidate"], "D/D(d*t)");
}

#[test]
fn commutative_origin() {
    let v = json(&["commutative", "0", "0"]);
    assert_eq!(v["report"]["match"]["candidate"], "M1 + M2");
}

#[test]
fn hom_dimensions() {
    assert_eq!(json(&["hom", "d", "d"])["dimension"], 1);
    assert_eq!(json(&["hom", "d", "t"])["dimension"], 0);
}

#[test]
fn iso_witness_and_negative() {
    let v = json(&["iso", "t*d - 1/2", "t*d - 3/2"]);
    assert_eq!(v["verified"], true);
    assert_eq!(v["source"], serde_json::json!({"type": "cyclic", "p": "t*d - 1/2"}));
    let out = run(&["iso", "t*d - 1/2", "t*d - 1/3"]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["witness"], Value::Null);
}

#[test]
fn iso_accepts_presented_json() {
    let m = r#"{"type":"presented","n":2,"delta":[["d","-1"],["0","t"]]}"#;
    let v = json(&["iso", m, "t*d - 1"]);
    assert_eq!(v["verified"], true);
}

#[test]
fn errors_are_structured() {
    let out = run(&["hom", "d^2+", "t"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"]["kind"], "syntax");

    let out = run(&["ext", "--max-degree", "17"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"]["kind"], "degree_cap");

    let bad = r#"{"e1":[["1","0"],["0","0"]],"s12":[["1","0"],["0","0"]],"s21":[["0","0"],["0","0"]]}"#;
    let out = run(&["simple", bad]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"]["kind"], "relation_violation");

    let out = run(&["specialize", "T_2_6"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_is_byte_identical() {
    for args in [&["classify", "3"][..], &["specialize", "T_2_6", "--param", "a=2"], &["hull"]] {
        assert_eq!(run(args).stdout, run(args).stdout);
    }
}

#[test]
fn text_format() {
    let out = run(&["classify", "1", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("2 discrete and 0 one-parameter classes in dimension 1"));
}
