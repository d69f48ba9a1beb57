use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const FIXTURE: &str = r#"{"row_parities":["e","o"],"col_parities":["e","o"],"entries":[[2,"t1"],["t2",3]]}"#;
const PLANE_5_1: &str = r#"{"gens":2,"row_parities":["e","e"],"col_parities":["e","e","e","e","e","o"],
  "entries":[[1,0,2,3,-1,"t1"],[0,1,5,7,4,"t2"]]}"#;

fn file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("splk-test-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    fs::write(&p, contents).unwrap();
    p
}

fn splk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_splk")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap().trim_end().to_string()
}

fn path(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

#[test]
fn ber_of_fixture() {
    let m = file("ber.json", FIXTURE);
    let o = splk(&["ber", "--in", path(&m)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "2/3 - 1/9*t1*t2");

    let star = splk(&["ber", "--in", path(&m), "--star"]);
    assert_eq!(stdout(&star), "3/2 + 1/4*t1*t2");

    let j: Value = serde_json::from_slice(&splk(&["--json", "ber", "--in", path(&m)]).stdout).unwrap();
    assert_eq!(j["value"], "2/3 - 1/9*t1*t2");
}

#[test]
fn ghost_column() {
    let g = file("ghost.json", r#"{"gens":2,"row_parities":["e","o"],"col_parities":["e","o"],"entries":[[2,1],["t2","t1"]]}"#);
    let o = splk(&["ber", "--in", path(&g), "--ghost-col", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1/2*t1 - 1/4*t2");
    let m = file("ghost-bad.json", FIXTURE);
    assert_eq!(splk(&["ber", "--in", path(&m), "--ghost-col", "2"]).status.code(), Some(1));
    assert_eq!(splk(&["ber", "--in", path(&m), "--ghost-col", "9"]).status.code(), Some(1));
}

#[test]
fn dimensions() {
    assert_eq!(stdout(&splk(&["dim", "--shape", "1|1", "--ambient", "2|2"])), "2|2");
    assert_eq!(stdout(&splk(&["grassmannian", "dim", "--shape", "2|0", "--ambient", "5|1"])), "6|2");
    assert_eq!(splk(&["dim", "--shape", "3|0", "--ambient", "2|2"]).status.code(), Some(1));
}

#[test]
fn exit_codes() {
    let bad = file("bad.json", "{");
    assert_eq!(splk(&["ber", "--in", path(&bad)]).status.code(), Some(3));
    let expr = file("expr.json", r#"{"row_parities":["e"],"col_parities":["e"],"entries":[["1.5"]]}"#);
    assert_eq!(splk(&["ber", "--in", path(&expr)]).status.code(), Some(3));
    let parity = file("parity.json", r#"{"row_parities":["e"],"col_parities":["e"],"entries":[["t1"]]}"#);
    assert_eq!(splk(&["ber", "--in", path(&parity)]).status.code(), Some(1));
    assert_eq!(splk(&["ber", "--in", "/nonexistent/m.json"]).status.code(), Some(1));
}

#[test]
fn coordinates_roundtrip_and_check() {
    let p = file("plane.json", PLANE_5_1);
    let coords = splk(&["--json", "pluck", "coords", "--in", path(&p)]);
    assert_eq!(coords.status.code(), Some(0));
    let c = file("coords.json", &stdout(&coords));
    let check = splk(&["pluck", "check", "--in", path(&c)]);
    assert_eq!(check.status.code(), Some(0), "{}", stdout(&check));

    let back = splk(&["--json", "pluck", "invert", "--in", path(&c), "--chart", "1,2|"]);
    let a: Value = serde_json::from_str(PLANE_5_1).unwrap();
    let b: Value = serde_json::from_slice(&back.stdout).unwrap();
    let ints = |v: &Value| v["entries"].to_string().replace('"', "");
    assert_eq!(ints(&a), ints(&b));
}

#[test]
fn broken_bivector_exits_two() {
    let p = file("mv-plane.json", PLANE_5_1);
    let w = splk(&["multivector", "wedge", "--in", path(&p)]);
    let mut doc: Value = serde_json::from_slice(&w.stdout).unwrap();
    let good = file("mv.json", &doc.to_string());
    assert_eq!(stdout(&splk(&["multivector", "simple", "--in", path(&good)])).lines().next(), Some("simple: true"));
    assert_eq!(splk(&["multivector", "check", "--in", path(&good)]).status.code(), Some(0));

    doc["components"]["1,2"] = Value::from("100");
    let bad = file("mv-bad.json", &doc.to_string());
    assert_eq!(splk(&["multivector", "check", "--in", path(&bad)]).status.code(), Some(2));
    assert_eq!(stdout(&splk(&["multivector", "simple", "--in", path(&bad)])), "simple: false");
}

#[test]
fn cluster_commands() {
    let dot = splk(&["cluster", "build", "--case", "4_1"]);
    assert!(stdout(&dot).starts_with("graph supercluster {"));
    assert_eq!(splk(&["cluster", "build", "--case", "7_1"]).status.code(), Some(1));

    let p = file("cl-plane.json", PLANE_5_1);
    let o = splk(&["--json", "cluster", "build", "--case", "5_1", "--seed-plane", path(&p), "--walk", "odd:th3th4"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["walk"][0]["relations"][0], "T13*th4 = T14*th3 + th1*T43");
    let state = file("state.json", &v["state"].to_string());

    let m = splk(&["cluster", "mutate", "--in", path(&state), "--step", "even:T14"]);
    let text = stdout(&m);
    assert!(text.starts_with("cluster (T13,T35 | th3,th5)"), "{text}");
    // T35 is the 2x2 minor on columns 3 and 5
    assert!(text.contains("T35 = 13"), "{text}");

    let w = splk(&["cluster", "walk", "--in", path(&state), "--walk", "odd:th4th3,odd:th3th4"]);
    assert!(stdout(&w).starts_with("cluster (T13,T14 | th1,th4)"));
    assert_eq!(splk(&["cluster", "mutate", "--in", path(&state), "--step", "even:T25"]).status.code(), Some(1));
}

#[test]
fn output_is_deterministic() {
    let p = file("det-plane.json", PLANE_5_1);
    let a = splk(&["--json", "cluster", "build", "--case", "5_1", "--seed-plane", path(&p)]);
    let b = splk(&["--json", "cluster", "build", "--case", "5_1", "--seed-plane", path(&p)]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn quick_selftest_single_criterion() {
    let o = splk(&["selftest", "--quick", "--criterion", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("[PASS] criterion 1"), "{}", stdout(&o));
}

#[test]
fn chart_changes() {
    let q = r#"{"gens":2,"row_parities":["e","o"],"col_parities":["e","e","o","o"],"entries":[[2,1,"t1",0],["t2",0,3,1]]}"#;
    let p = file("chart.json", q);
    let n = splk(&["--json", "grassmannian", "normalize", "--in", path(&p), "--chart", "1|1"]);
    let v: Value = serde_json::from_slice(&n.stdout).unwrap();
    assert_eq!(v["entries"][0][0], "1");
    assert_eq!(v["entries"][1][2], "1");
    let c = splk(&["--json", "grassmannian", "change-chart", "--in", path(&p), "--from", "1|1", "--to", "2|2"]);
    let w: Value = serde_json::from_slice(&c.stdout).unwrap();
    let orig: Value = serde_json::from_str(q).unwrap();
    assert_eq!(w["entries"].to_string().replace('"', ""), orig["entries"].to_string().replace('"', ""));
}
