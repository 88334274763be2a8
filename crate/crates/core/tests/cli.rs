use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pattern-cert"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn deltas(dir: &Path, depth: &str, out: &str) -> serde_json::Value {
    let o = run(dir, &["deltas", "--h", "pow:1/2", "--L", "4", "--N", "1", "--depth", depth, "--out", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&fs::read_to_string(dir.join(out)).unwrap()).unwrap()
}

#[test]
fn deltas_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let v = deltas(dir.path(), "8", "a.json");
    assert_eq!(v["deltas"].as_array().unwrap().len(), 9);
    deltas(dir.path(), "8", "b.json");
    assert_eq!(fs::read(dir.path().join("a.json")).unwrap(), fs::read(dir.path().join("b.json")).unwrap());
}

#[test]
fn depth_zero_has_one_scale() {
    let dir = tempfile::tempdir().unwrap();
    let v = deltas(dir.path(), "0", "d.json");
    assert_eq!(v["deltas"].as_array().unwrap().len(), 1);
}

#[test]
fn witness_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    deltas(dir.path(), "4", "d.json");
    let o = run(dir.path(), &["witness", "--deltas", "d.json", "--pattern", "x", "--depth", "1", "--out", "one.json"]);
    assert!(o.status.success());
    let c: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("one.json")).unwrap()).unwrap();
    assert_eq!(c["steps"].as_array().unwrap().len(), 1);

    let o = run(
        dir.path(),
        &["witness", "--deltas", "d.json", "--pattern", "x; 2*x+1; x^2", "--depth", "4", "--out", "c.json"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("verified"));
    let o = run(dir.path(), &["verify", "--certificate", "c.json"]);
    assert_eq!(o.status.code(), Some(0));

    let text = fs::read_to_string(dir.path().join("c.json")).unwrap();
    let mut c: serde_json::Value = serde_json::from_str(&text).unwrap();
    c["witness"] = serde_json::Value::String("0".into());
    fs::write(dir.path().join("bad.json"), c.to_string()).unwrap();
    let o = run(dir.path(), &["verify", "--certificate", "bad.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn mismatched_lipschitz_constant_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    deltas(dir.path(), "4", "d.json");
    let o = run(
        dir.path(),
        &["witness", "--deltas", "d.json", "--pattern", "x", "--depth", "1", "--L", "2", "--out", "c.json"],
    );
    assert_eq!(o.status.code(), Some(3));
    assert!(!dir.path().join("c.json").exists());
}

#[test]
fn measure_table() {
    let dir = tempfile::tempdir().unwrap();
    deltas(dir.path(), "8", "d.json");
    let o = run(dir.path(), &["certify-measure", "--deltas", "d.json", "--N1", "1", "--N2", "1", "--out", "m.csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("m.csv")).unwrap();
    assert_eq!(csv.lines().count(), 9);
    assert_eq!(csv.lines().next().unwrap(), "n,M,bound_exact_num,bound_exact_den,paper_bound");

    let o = run(dir.path(), &["deltas", "--h", "pow:1/2", "--L", "2", "--N", "1", "--depth", "2", "--out", "d2.json"]);
    assert!(o.status.success());
    let o = run(dir.path(), &["certify-measure", "--deltas", "d2.json", "--N1", "1", "--N2", "9", "--out", "u.csv"]);
    assert!(o.status.success());
    assert!(fs::read_to_string(dir.path().join("u.csv")).unwrap().contains("uncertified"));

    let o = run(
        dir.path(),
        &["certify-measure", "--deltas", "d.json", "--N1", "1", "--N2", "1", "--levels", "0", "--out", "z.csv"],
    );
    assert!(o.status.success());
    assert_eq!(fs::read_to_string(dir.path().join("z.csv")).unwrap().lines().count(), 1);
}

#[test]
fn reduce_bivariate() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("p.txt"), "x1*x2\nx1 - x2\n").unwrap();
    let o = run(dir.path(), &["reduce", "--input", "p.txt", "--out", "u.txt"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = fs::read_to_string(dir.path().join("u.txt")).unwrap();
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines, ["# lambdas: 2", "2*x^2", "-x"]);
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.conf"), "h = pow:1/2\nL = 4\nN = 1\ndepth = 3\n").unwrap();
    let o = run(dir.path(), &["--config", "run.conf", "deltas", "--out", "d.json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("d.json")).unwrap()).unwrap();
    assert_eq!(v["deltas"].as_array().unwrap().len(), 4);
}

#[test]
fn bad_config_is_invalid_input() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.conf"), "colour = red\n").unwrap();
    let o = run(dir.path(), &["--config", "run.conf", "deltas"]);
    assert_eq!(o.status.code(), Some(3));
}
