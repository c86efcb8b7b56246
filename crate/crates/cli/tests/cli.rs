use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crowd-pivot"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn aggregate_prints_each_method() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "p.csv", "judge,estimate,peer_estimate\na,10,12\nb,12,12\nc,14,12\n");
    let out = run(&["aggregate", "--input", &input, "--methods", "mean,mp,np,pivot:0.5"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "method,estimate\nmean,12\nmp,12\nnp,12\npivot:0.5,12\n");

    let input = write(dir.path(), "q.csv", "estimate,peer_estimate\n10,8\n12,10\n14,12\n");
    let out = run(&["aggregate", "--input", &input, "--methods", "mean,mp,np"]);
    assert_eq!(stdout(&out), "method,estimate\nmean,12\nmp,14\nnp,16\n");
}

#[test]
fn theory_subcommands() {
    let out = run(&["theory", "prob-pw", "0.6667"]);
    let v: f64 = stdout(&out).trim().parse().unwrap();
    assert!((v - 0.937).abs() < 0.001);
    assert_eq!(stdout(&run(&["theory", "range"])), "0,2\n");

    let out = run(&["theory", "mse", "--p", "0.5", "--w", "0.5", "--psi", "2"]);
    assert_eq!(stdout(&out), "p,w,psi,limiting_mse,finite_mse\n0.5,0.5,2,0.0703125,\n");

    let out = run(&["theory", "region", "--grid-resolution", "3"]);
    assert_eq!(stdout(&out).lines().count(), 1 + 9);
}

#[test]
fn usage_errors_exit_2_and_runtime_errors_exit_1() {
    assert_eq!(run(&["evaluate"]).status.code(), Some(2));
    assert_eq!(run(&["aggregate", "--input", "x", "--methods", "bogus"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "e.csv", "");
    let out = run(&["evaluate", "--input", &empty]);
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "parse");

    let out = run(&["evaluate", "--input", dir.path().join("missing.csv").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "io");
}

#[test]
fn simulate_config_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "c.toml", "judges = 7\np = 0.3\nstructure = \"nested\"\n");
    let data = dir.path().join("d.csv");
    let out = run(&[
        "simulate",
        "--config",
        &config,
        "--judges",
        "5",
        "--trials",
        "2",
        "--output",
        data.to_str().unwrap(),
        "--psi",
        "0,2",
        "--replications",
        "50",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mse = stdout(&out);
    assert_eq!(mse.lines().count(), 3);
    assert!(mse.lines().nth(1).unwrap().starts_with("5,0.3,"));
    assert!(mse.contains(",nested,"));
    assert_eq!(fs::read_to_string(&data).unwrap().lines().count(), 1 + 2 * 5);

    let bad = write(dir.path(), "bad.toml", "judgez = 7\n");
    assert_eq!(run(&["simulate", "--config", &bad, "--trials", "1"]).status.code(), Some(1));
}

#[test]
fn bootstrap_svg_per_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("experiment,trial,judge,estimate,peer_estimate,truth,task\n");
    for exp in ["first one", "second"] {
        for t in 0..3 {
            for j in 0..4 {
                let f = 10.0 + j as f64 + t as f64;
                csv.push_str(&format!("{exp},t{t},j{j},{f},{},{},continuous\n", f + 1.0, 9.0 + t as f64));
            }
        }
    }
    let input = write(dir.path(), "b.csv", &csv);
    let svg = dir.path().join("curve.svg");
    let out = run(&[
        "bootstrap",
        "--input",
        &input,
        "--sizes",
        "2,4",
        "--boot",
        "20",
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 1 + 2 * 6 * 2);
    assert!(dir.path().join("curve-first_one.svg").exists());
    assert!(dir.path().join("curve-second.svg").exists());
}
