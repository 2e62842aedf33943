use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_quiverflow"));
    c.env_remove("QUIVERFLOW_SEED");
    c
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("quiverflow-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

const F1: &str = r#"{"quiver":{"vertices":["inf","1"],"edges":[{"tail":"inf","head":"1","label":"a"},{"tail":"1","head":"inf","label":"b"}],"infinity":"inf","pairs":[[0,1]]},
"dims":{"inf":1,"1":1},"mats":{"1":[[["3","0"]]]}}"#;

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

#[test]
fn flow_writes_limit_and_trajectory() {
    let dir = scratch("flow");
    let rep = dir.join("x.json");
    std::fs::write(&rep, F1).unwrap();
    let (lim, csv) = (dir.join("lim.json"), dir.join("t.csv"));
    let out = bin()
        .args(["flow", "--rep", rep.to_str().unwrap(), "--limit", lim.to_str().unwrap(), "--trajectory", csv.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["command"], "flow");
    assert_eq!(r["result"]["status"], "converged");
    assert!(r["timestamp"].as_str().unwrap().starts_with("unix:"));
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("t,energy,grad_norm,constraint_norm\n"));
    let limit = quiverflow::io::read_rep(&lim).unwrap();
    let b = limit.mats[1][(0, 0)].norm();
    assert!((b - 2f64.sqrt()).abs() < 1e-6);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn exit_codes_distinguish_failures() {
    let dir = scratch("codes");
    let rep = dir.join("x.json");
    std::fs::write(&rep, F1).unwrap();
    let budget = bin().args(["flow", "--rep", rep.to_str().unwrap(), "--max-steps", "2"]).output().unwrap();
    assert_eq!(budget.status.code(), Some(3));
    assert_eq!(report(&budget)["error"]["code"], 3);

    let missing = bin().args(["validate", "--rep", dir.join("nope.json").to_str().unwrap()]).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));

    let bad_vertex = bin()
        .args(["hecke", "--x1", rep.to_str().unwrap(), "--x2", rep.to_str().unwrap(), "--vertex", "zz"])
        .output()
        .unwrap();
    assert_eq!(bad_vertex.status.code(), Some(2));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let dir = scratch("out");
    let path = dir.join("q.json");
    let out = bin()
        .args(["--out", path.to_str().unwrap(), "handsaw", "to-quiver", "--n", "2", "--v", "1", "--w", "1,1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["result"]["dims"]["V1"], 1);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn seed_comes_from_the_environment() {
    let out = bin().env("QUIVERFLOW_SEED", "42").args(["handsaw", "to-quiver", "--n", "2", "--v", "1", "--w", "1,1"]).output().unwrap();
    assert_eq!(report(&out)["seed"], 42);
}
