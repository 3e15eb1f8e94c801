use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fockcodes")).args(args).current_dir(dir).output().unwrap()
}

fn code_of(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write_code(dir: &Path, name: &str, body: &str) {
    fs::write(dir.join(name), body).unwrap();
}

#[test]
fn sample_then_certify_round_trip() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["greedy", "--q", "3", "--N", "6", "--t", "3", "--no-typicality", "--out", "g.json"]);
    assert_eq!(code_of(&o), 0);
    let o = run(d.path(), &["certify", "--code", "g.json", "--K", "2", "--t", "2", "--gamma", "0.05", "--out", "c.json"]);
    assert_eq!(code_of(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.path().join("c.json")).unwrap()).unwrap();
    assert_eq!(v["orthogonality"]["verdict"], "proved_by_distance");
    assert_eq!(v["M"], 10);
    assert!(v["input_digests"]["code"].as_str().unwrap().len() == 64);
    assert!(v.get("wallclock_seconds").is_none());
}

#[test]
fn refusal_exits_4_with_witness() {
    let d = tempfile::tempdir().unwrap();
    write_code(d.path(), "c.json", r#"{"q":2,"N":4,"ensemble":"explicit","words":[[4,0],[3,1],[0,4],[1,3]]}"#);
    let o = run(d.path(), &["certify", "--code", "c.json", "--K", "2", "--t", "1", "--gamma", "0.1", "--out", "r.json"]);
    assert_eq!(code_of(&o), 4);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("witness"), "{err}");
    assert!(!d.path().join("r.json").exists());
}

#[test]
fn duplicates_and_bad_input_exit_2() {
    let d = tempfile::tempdir().unwrap();
    write_code(d.path(), "dup.json", r#"{"q":2,"N":2,"ensemble":"explicit","words":[[2,0],[2,0]]}"#);
    let o = run(d.path(), &["certify", "--code", "dup.json", "--K", "1", "--t", "0", "--gamma", "0.1", "--out", "r.json"]);
    assert_eq!(code_of(&o), 2);
    write_code(d.path(), "neg.json", r#"{"q":2,"N":2,"ensemble":"explicit","words":[[3,-1]]}"#);
    let o = run(d.path(), &["certify", "--code", "neg.json", "--K", "1", "--t", "0", "--gamma", "0.1", "--out", "r.json"]);
    assert_eq!(code_of(&o), 2);
    let o = run(d.path(), &["sample", "--q", "2", "--L", "3", "--out", "x.json"]);
    assert_eq!(code_of(&o), 2);
    let o = run(d.path(), &["bounds", "--alpha", "-1"]);
    assert_eq!(code_of(&o), 2);
}

#[test]
fn caps_exit_3() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["greedy", "--q", "20", "--N", "20", "--t", "3", "--no-typicality", "--cap-enum", "1000", "--out", "g.json"]);
    assert_eq!(code_of(&o), 3);
    write_code(d.path(), "c.json", r#"{"q":3,"N":6,"ensemble":"explicit","words":[[6,0,0],[0,6,0],[0,0,6],[2,2,2]]}"#);
    let o = run(
        d.path(),
        &["certify", "--code", "c.json", "--K", "2", "--t", "2", "--gamma", "0.1", "--cap-patterns", "5", "--out", "r.json"],
    );
    assert_eq!(code_of(&o), 3);
}

#[test]
fn oracle_fault_exits_5() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["oracle", "--q", "2", "--N", "3", "--out", "ok"]);
    assert_eq!(code_of(&o), 0);
    let o = run(d.path(), &["oracle", "--q", "2", "--N", "3", "--inject-fault", "--out", "bad"]);
    assert_eq!(code_of(&o), 5);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.path().join("bad/oracle_report.json")).unwrap()).unwrap();
    assert!(v["violations"].as_u64().unwrap() > 0);
}

#[test]
fn config_file_with_flag_override() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("cfg.json"), r#"{"q":3,"N":5,"L":4,"seed":9,"out":"a.json"}"#).unwrap();
    assert_eq!(code_of(&run(d.path(), &["--config", "cfg.json", "sample"])), 0);
    assert_eq!(code_of(&run(d.path(), &["--config", "cfg.json", "sample", "--seed", "10", "--out", "b.json"])), 0);
    assert_eq!(code_of(&run(d.path(), &["sample", "--q", "3", "--N", "5", "--L", "4", "--seed", "9", "--out", "c.json"])), 0);
    let a = fs::read(d.path().join("a.json")).unwrap();
    let b = fs::read(d.path().join("b.json")).unwrap();
    let c = fs::read(d.path().join("c.json")).unwrap();
    assert_eq!(a, c);
    assert_ne!(a, b);
    fs::write(d.path().join("bad.json"), r#"{"q":3,"bogus":1}"#).unwrap();
    assert_eq!(code_of(&run(d.path(), &["--config", "bad.json", "sample"])), 2);
}

#[test]
fn bounds_writes_curves_and_crossings() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["bounds", "--alpha", "5", "--points", "6", "--curves", "gv,u,quantum_multinomial", "--crossing", "--out", "b"]);
    assert_eq!(code_of(&o), 0);
    let gv = fs::read_to_string(d.path().join("b/rate_gv_alpha5.csv")).unwrap();
    let lines: Vec<&str> = gv.lines().collect();
    assert_eq!(lines[0], "delta,value");
    assert_eq!(lines.len(), 7);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.path().join("b/bounds_summary.json")).unwrap()).unwrap();
    assert_eq!(v["crossings"].as_array().unwrap().len(), 4);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("zero crossing"));
}
