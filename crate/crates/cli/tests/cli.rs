use std::process::{Command, Output};

use serde_json::Value;

fn psde(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psde"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(args: &[&str]) -> (i32, Value) {
    let out = psde(args);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "{args:?}: {e}\nstdout: {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    });
    (code(&out), v)
}

fn csv_rows(args: &[&str]) -> (i32, Vec<Vec<String>>) {
    let out = psde(args);
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    let mut rows = vec![r.headers().unwrap().iter().map(String::from).collect()];
    for rec in r.records() {
        rows.push(rec.unwrap().iter().map(String::from).collect());
    }
    (code(&out), rows)
}

#[test]
fn report_envelope() {
    let (c, v) = json(&["--seed", "11", "table"]);
    assert_eq!(c, 0);
    assert_eq!(v["schema"], "psde-report/1");
    assert_eq!(v["command"], "table");
    assert_eq!(v["seed"], 11);
    assert_eq!(v["passed"], true);
    assert!(v["subject"].as_str().is_some_and(|s| !s.is_empty()));
    assert!(v["inputs"].is_object());
    assert!(v["tolerances"].is_object());
}

#[test]
fn table_bases() {
    let (c, v) = json(&["table"]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["pairs_checked"], 36);
    assert_eq!(v["result"]["nonzero"], 17);
    assert_eq!(v["result"]["mismatches"].as_array().unwrap().len(), 0);

    let (c, v) = json(&["table", "--basis", "X"]);
    assert_eq!(c, 0, "{v}");
    let (c, v) = json(&["table", "--basis", "so31", "--gamma", "1/2"]);
    assert_eq!(c, 0, "{v}");
    assert_eq!(v["inputs"]["gamma"], "1/2");
    assert!(v["result"]["at_gamma"].is_object());
    assert_eq!(v["result"]["negative_powers"].as_array().unwrap().len(), 0);
}

#[test]
fn verify_kinds_pass() {
    for kind in [
        &["verify", "symmetry"][..],
        &["verify", "determining", "--families", "3"],
        &["verify", "virasoro", "--range", "2"],
        &["verify", "contraction"],
        &["verify", "duality"],
        &["verify", "lift"],
    ] {
        let (c, v) = json(kind);
        assert_eq!(c, 0, "{kind:?}: {v}");
        assert_eq!(v["passed"], true);
    }
}

#[test]
fn symmetry_multipliers() {
    let (_, v) = json(&["verify", "symmetry"]);
    let xi: Vec<&str> = v["result"]["generators"]
        .as_array()
        .unwrap()
        .iter()
        .map(|g| g["xi"].as_str().unwrap())
        .collect();
    assert_eq!(xi, ["0", "2", "2*t", "0", "0", "0", "0", "0", "0"]);
}

#[test]
fn virasoro_count() {
    // (2r+1)^2 Witt relations, 3 for L, tL, t^2L and 3 per m for the K brackets
    let (_, v) = json(&["verify", "virasoro", "--range", "4"]);
    assert_eq!(v["result"]["total"], 81 + 3 + 3 * 9);
    assert_eq!(v["result"]["failed"], 0);
}

#[test]
fn reports_are_deterministic() {
    let a = psde(&["--seed", "7", "verify", "determining"]);
    let b = psde(&["--seed", "7", "verify", "determining"]);
    assert_eq!(a.stdout, b.stdout);
    let c = psde(&["--seed", "8", "verify", "determining"]);
    assert_ne!(a.stdout, c.stdout);
    let f1 = psde(&[
        "flow", "--i", "4", "--lambda", "1", "--x", "0.5", "--t", "2",
    ]);
    let f2 = psde(&[
        "flow", "--i", "4", "--lambda", "1", "--x", "0.5", "--t", "2",
    ]);
    assert_eq!(f1.stdout, f2.stdout);
}

#[test]
fn thermal_grid_csv() {
    let (c, rows) = csv_rows(&[
        "--format", "csv", "solution", "thermal", "--nbar", "1", "--grid", "default",
    ]);
    assert_eq!(c, 0);
    assert_eq!(rows[0], ["x", "p", "t", "value"]);
    assert_eq!(rows.len(), 1 + 3 * 81);
    let times: std::collections::BTreeSet<&str> = rows[1..].iter().map(|r| r[2].as_str()).collect();
    assert_eq!(times, ["1", "1/2", "2"].into_iter().collect());
    // 2 ((3 + t)(3 + 1/t))^{-1/2} exp(-x^2/(3 + t) - p^2/(3 + 1/t)) at x = p = 0, t = 1
    let origin = rows
        .iter()
        .find(|r| r[0] == "0" && r[1] == "0" && r[2] == "1")
        .unwrap();
    let v: f64 = origin[3].parse().unwrap();
    assert!((v - 0.5).abs() < 1e-15, "{v}");
}

#[test]
fn kernel_window_and_errors() {
    let (c, v) = json(&[
        "solution",
        "kernel",
        "--two-sided",
        "--t0",
        "0",
        "--t1",
        "1",
        "--grid",
        "default",
    ]);
    assert_eq!(c, 0, "{v}");
    let times = v["result"]["samples"]["times"].as_array().unwrap();
    assert_eq!(times.len(), 3);
    assert_eq!(times[0], "1/4");
    assert_eq!(v["result"]["residual"], "0");

    let out = psde(&[
        "solution",
        "kernel",
        "--two-sided",
        "--t0",
        "1",
        "--t1",
        "1/2",
    ]);
    assert_eq!(code(&out), 2);
    let out = psde(&[
        "solution", "kernel", "--side", "p", "--t1", "1", "--grid", "default", "--t", "2",
    ]);
    assert_eq!(code(&out), 2);
}

fn heat_oracle(n: usize, x: f64, t: f64) -> f64 {
    // v_{k+1} = 2x v_k + 2k t v_{k-1} for v_k(2x, t)
    let (mut a, mut b) = (1.0, 2.0 * x);
    if n == 0 {
        return a;
    }
    for k in 1..n {
        let c = 2.0 * x * b + 2.0 * k as f64 * t * a;
        a = b;
        b = c;
    }
    b
}

#[test]
fn heat_polynomial_text() {
    let out = psde(&["--format", "text", "solution", "heatpoly", "--n", "6"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("64*x^6"), "{text}");
    let (_, rows) = csv_rows(&[
        "--format", "csv", "solution", "heatpoly", "--n", "6", "--grid", "default",
    ]);
    for r in &rows[1..] {
        let f = |s: &str| -> f64 {
            match s.split_once('/') {
                Some((n, d)) => n.parse::<f64>().unwrap() / d.parse::<f64>().unwrap(),
                None => s.parse().unwrap(),
            }
        };
        let (x, t, v) = (f(&r[0]), f(&r[2]), f(&r[3]));
        let want = heat_oracle(6, x, t);
        assert!(
            (v - want).abs() <= 1e-12 * want.abs().max(1.0),
            "{r:?} vs {want}"
        );
    }
}

#[test]
fn emit_and_apply_group() {
    let dir = std::env::temp_dir().join(format!("psde-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("v2.txt");
    let f = file.to_str().unwrap();
    let (c, _) = json(&["solution", "heatpoly", "--n", "2", "--emit", f]);
    assert_eq!(c, 0);
    assert_eq!(
        std::fs::read_to_string(&file).unwrap().trim(),
        "2*t + 4*x^2"
    );

    let (c, v) = json(&[
        "apply-group",
        "--i",
        "4",
        "--c",
        "5/4",
        "--s",
        "3/4",
        "--solution",
        f,
    ]);
    assert_eq!(c, 0, "{v}");
    assert_eq!(v["result"]["image_is_solution"], true);
    let (c, v) = json(&[
        "apply-group",
        "--i",
        "2",
        "--scale",
        "3",
        "--expr",
        "x^2 + 1/2*t",
    ]);
    assert_eq!(c, 0, "{v}");
    assert_eq!(v["result"]["image"], "9/2*t + 9*x^2");
    let (c, v) = json(&[
        "apply-group",
        "--i",
        "1",
        "--lambda",
        "-1/2",
        "--expr",
        "x^2",
    ]);
    assert_eq!(c, 0, "{v}");
    assert_eq!(v["result"]["input_is_solution"], false);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["table", "--basis", "B"][..],
        &["apply-group", "--i", "2", "--lambda", "1", "--expr", "1"],
        &["apply-group", "--i", "10", "--lambda", "1", "--expr", "1"],
        &["apply-group", "--i", "1", "--lambda", "1", "--expr", "x^"],
        &["flow", "--i", "1", "--lambda", "-2", "--t", "1"],
        &["solution", "thermal", "--nbar", "-1"],
        &["invariance", "--gamma", "0"],
        &["classify-b", "--b", "0"],
        &["solution", "hermite", "--n", "3", "--format", "csv"],
        &["frobnicate"],
    ] {
        let out = psde(args);
        assert_eq!(
            code(&out),
            2,
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn classify() {
    let (c, v) = json(&["classify-b", "--b", "(2*t+3)^-2"]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["class"], "StandardReducible");
    assert_eq!(v["result"]["dimension"], 9);
    let (_, v) = json(&["classify-b", "--b", "2*t^3"]);
    assert_eq!(v["result"]["class"], "PowerLaw");
    assert_eq!(v["result"]["generators"].as_array().unwrap().len(), 6);
    let (_, v) = json(&["classify-b", "--b", "t^2 + 1"]);
    assert_eq!(v["result"]["class"], "Generic");
}

#[test]
fn flow_matches_closed_form() {
    // G_3: T = t/(1 + t), X = x/(1 + t) at lambda = 1
    let (c, rows) = csv_rows(&[
        "--format", "csv", "flow", "--i", "3", "--lambda", "1", "--x", "0.5", "--t", "1",
        "--every", "500",
    ]);
    assert_eq!(c, 0);
    assert_eq!(rows[0], ["lambda", "X", "P", "T", "sigma"]);
    let last = rows.last().unwrap();
    let g = |i: usize| last[i].parse::<f64>().unwrap();
    assert!((g(1) - 0.25).abs() < 1e-10);
    assert!((g(3) - 0.5).abs() < 1e-10);
    // (1 + t)^{-1/2} exp(-x^2/(1 + t))
    let sigma = 2f64.powf(-0.5) * (-0.125f64).exp();
    assert!((g(4) - sigma).abs() < 1e-10);
}

#[test]
fn delta_and_invariance() {
    let (c, v) = json(&[
        "delta-test",
        "--side",
        "x",
        "--phi",
        "gaussian,cosine",
        "--center",
        "1/2",
    ]);
    assert_eq!(c, 0, "{v}");
    assert_eq!(v["result"]["functions"].as_array().unwrap().len(), 2);

    let (c, v) = json(&["invariance", "--gamma", "1"]);
    assert_eq!(c, 0, "{v}");
    // both integrals equal sqrt(pi/gamma), so sqrt(pi) only at gamma = 1
    let (c, v) = json(&["invariance", "--gamma", "1/2"]);
    assert_eq!(c, 1);
    assert_eq!(v["result"]["independent_of_t"], true);
    let cf = v["result"]["closed_form"].as_f64().unwrap();
    assert!((cf - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);
}

#[test]
fn precision_samples() {
    let out = psde(&[
        "--precision",
        "128",
        "--format",
        "csv",
        "solution",
        "thermal",
        "--grid",
        "default",
        "--t",
        "1",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    // nbar = 0 at the origin and t = 1: 2 (2 * 2)^{-1/2} = 1
    let row = text.lines().find(|l| l.starts_with("0,0,1,")).unwrap();
    let v: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
    assert_eq!(v, 1.0);
}
