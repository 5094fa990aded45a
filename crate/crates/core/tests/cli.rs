use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn convlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_convlab")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn list_shows_every_scenario() {
    let o = convlab(&["list", "--json"]);
    assert_eq!(code(&o), 0);
    let cat: Value = serde_json::from_slice(&o.stdout).unwrap();
    let names: Vec<&str> = cat.as_array().unwrap().iter().map(|s| s["name"].as_str().unwrap()).collect();
    for n in ["prekopa-cex", "berndtsson-cex", "lemma1", "lemma2", "lemma3", "disc-distance"] {
        assert!(names.contains(&n), "{n} missing");
    }
    assert!(cat.as_array().unwrap().iter().all(|s| !s["references"].as_array().unwrap().is_empty()));
    let o = convlab(&["list"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("prekopa-cex"));
}

#[test]
fn run_writes_report_and_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = convlab(&["run", "prekopa-cex", "--out", path(&out), "--csv", path(dir.path())]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["scenario"], "prekopa-cex");
    assert_eq!(report["verdict"], "pass");
    assert_eq!(report["params"]["epsilon"], 0.1);
    let csv = std::fs::read_to_string(dir.path().join("prekopa-cex_marginal.csv")).unwrap();
    assert!(csv.starts_with("t,value\n"));
    assert_eq!(csv.lines().count(), 502);
}

#[test]
fn reports_are_reproducible_except_wall_time() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("r{i}.json"));
        assert_eq!(code(&convlab(&["run", "lemma3", "--out", path(&out)])), 0);
        let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("wall_time");
        texts.push(serde_json::to_string(&v).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn several_scenarios_give_an_array() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = convlab(&["run", "lemma1", "lemma2", "--out", path(&out)]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
}

#[test]
fn overrides_reach_the_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    // Two coarse localization steps cannot reach the final-error bound.
    let o = convlab(&["run", "lemma1", "--k", "8,16", "--out", path(&out)]);
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["params"]["ks"], serde_json::json!([8, 16]));
    assert_eq!(v["verdict"], "fail");

    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"t": 0.5}"#).unwrap();
    let o = convlab(&["run", "lemma1", "--config", path(&cfg), "--out", path(&out)]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["params"]["t"], 0.5);
}

#[test]
fn bad_invocations_exit_3() {
    assert_eq!(code(&convlab(&["frobnicate"])), 3);
    assert_eq!(code(&convlab(&["run", "no-such-scenario"])), 3);
    assert_eq!(code(&convlab(&["run", "lemma1", "--epsilon", "abc"])), 3);
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"no_such_param": 1}"#).unwrap();
    assert_eq!(code(&convlab(&["run", "lemma1", "--config", path(&cfg)])), 3);
    assert_eq!(code(&convlab(&["--help"])), 0);
}

#[test]
fn marginal_csv_matches_closed_form() {
    let o = convlab(&["marginal", "--epsilon", "0.1", "--from", "0.5", "--to", "1", "--points", "3"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,value"));
    for line in lines {
        let (t, v) = line.split_once(',').unwrap();
        let (t, v): (f64, f64) = (t.parse().unwrap(), v.parse().unwrap());
        let closed = t * t - 0.01 - std::f64::consts::PI.sqrt().ln();
        assert!((v - closed).abs() < 1e-8, "{t}: {v} vs {closed}");
    }
}

#[test]
fn twisted_marginal_fails_convexity_check() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("twisted.csv");
    let report = dir.path().join("convex.json");
    let o = convlab(&[
        "marginal",
        "--twist-k",
        "128",
        "--from",
        "-0.08",
        "--to",
        "0.08",
        "--points",
        "3",
        "--out",
        path(&curve),
    ]);
    assert_eq!(code(&o), 0);
    let o = convlab(&["check-convex", "--input", path(&curve), "--out", path(&report)]);
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["verdict"], "fail");
    assert!((v["worst_violation"].as_f64().unwrap() - 0.0064).abs() < 1e-3);

    let plain = dir.path().join("plain.csv");
    assert_eq!(code(&convlab(&["marginal", "--points", "41", "--out", path(&plain)])), 0);
    assert_eq!(code(&convlab(&["check-convex", "--input", path(&plain)])), 0);
}

#[test]
fn bergman_kernel_on_the_unit_disc() {
    let dir = tempfile::tempdir().unwrap();
    let moments = dir.path().join("m.csv");
    let o = convlab(&["bergman", "--radius", "1", "--z", "0,0", "--z", "0.5,0", "--moments-out", path(&moments)]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let rows: Vec<Vec<f64>> =
        text.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert!((rows[0][2] - 1.0 / std::f64::consts::PI).abs() < 1e-10);
    assert!((rows[1][2] - 16.0 / (9.0 * std::f64::consts::PI)).abs() < 1e-6);
    let m = std::fs::read_to_string(&moments).unwrap();
    assert!(m.starts_with("k,value,status\n0,"));

    let o = convlab(&["bergman", "--radius", "1", "--method", "gram", "--degree", "16", "--z", "0.5,0"]);
    assert_eq!(code(&o), 0);
    let v: f64 = stdout(&o).lines().nth(1).unwrap().split(',').nth(2).unwrap().parse().unwrap();
    assert!((v - 16.0 / (9.0 * std::f64::consts::PI)).abs() < 1e-6);
}

#[test]
fn divergent_moments_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let moments = dir.path().join("m.csv");
    let o = convlab(&[
        "bergman",
        "--weight",
        "berndtsson_cex",
        "--epsilon",
        "0.3",
        "--base",
        "0.6,0",
        "--moments",
        "3",
        "--moments-out",
        path(&moments),
    ]);
    assert_eq!(code(&o), 0);
    let m = std::fs::read_to_string(&moments).unwrap();
    assert!(m.contains("1,inf,divergent"));
}

#[test]
fn numerical_failures_exit_2() {
    // The unweighted plane has no square-integrable constants.
    assert_eq!(code(&convlab(&["bergman", "--z", "0,0"])), 2);
    // The Gram path needs a bounded fiber.
    assert_eq!(code(&convlab(&["bergman", "--method", "gram", "--z", "0,0"])), 3);
}

#[test]
fn psh_checks() {
    let o = convlab(&[
        "check-psh",
        "--function",
        "neg-log-delta",
        "--domain",
        "bidisc",
        "--centers",
        "10",
        "--tol",
        "1e-9",
    ]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "pass");
    let o = convlab(&[
        "check-psh",
        "--function",
        "neg-log-delta",
        "--domain",
        "hartogs",
        "--center",
        "0.5,0",
        "--radii",
        "0.1",
    ]);
    assert_eq!(code(&o), 1);
    let o = convlab(&["check-psh", "--function", "berndtsson-phi", "--centers", "5", "--center-radius", "0.3"]);
    assert_eq!(code(&o), 0);
}
