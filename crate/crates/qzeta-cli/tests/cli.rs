//! End-to-end tests against the installed binary: exit codes, output
//! determinism, and the documented example invocations.

use std::process::{Command, Output};

fn qzeta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qzeta"))
        .args(args)
        .output()
        .expect("spawn qzeta")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf8 stdout")
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).expect("utf8 stderr")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

/// Pull "key":"value" out of a flat JSON record.
fn json_str_field(body: &str, key: &str) -> String {
    let tag = format!("\"{key}\":\"");
    let start = body.find(&tag).unwrap_or_else(|| panic!("no {key} in {body}")) + tag.len();
    let end = body[start..].find('"').expect("closing quote") + start;
    body[start..end].to_string()
}

/// CSV zero-table column: (zero, derivative) rows in file order.
fn zero_rows(csv: &str) -> Vec<(f64, f64)> {
    csv.lines()
        .skip(1)
        .filter(|l| !l.is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].parse().expect("zero"), f[2].parse().expect("derivative"))
        })
        .collect()
}

#[test]
fn zeros_csv_is_deterministic_and_increasing() {
    let args = ["zeros", "--kind", "sin", "--q", "0.5", "--K", "5", "--digits", "30", "--format", "csv"];
    let a = qzeta(&args);
    let b = qzeta(&args);
    assert_eq!(code(&a), 0, "stderr: {}", stderr(&a));
    assert_eq!(a.stdout, b.stdout, "repeated runs must be byte-identical");
    let rows = zero_rows(&stdout(&a));
    assert_eq!(rows.len(), 5);
    for w in rows.windows(2) {
        assert!(w[1].0 > w[0].0, "zeros not strictly increasing");
    }
    assert!(stderr(&a).contains("interlacing"), "diagnostics expected on stderr");
}

#[test]
fn zeros_rejects_q_outside_unit_interval() {
    let o = qzeta(&["zeros", "--q", "1.5"]);
    assert_eq!(code(&o), 2);
    let o = qzeta(&["zeros", "--q", "not-a-number"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn cos_zero_table_interlaces_sin_table() {
    let sin = qzeta(&["zeros", "--kind", "sin", "--q", "0.5", "--K", "6", "--format", "csv"]);
    let cos = qzeta(&["zeros", "--kind", "cos", "--q", "0.5", "--K", "6", "--format", "csv"]);
    assert_eq!(code(&sin), 0);
    assert_eq!(code(&cos), 0);
    let xi = zero_rows(&stdout(&sin));
    let eta = zero_rows(&stdout(&cos));
    for k in 0..6 {
        assert!(eta[k].0 < xi[k].0, "eta_{} < xi_{} fails", k + 1, k + 1);
        if k + 1 < 6 {
            assert!(xi[k].0 < eta[k + 1].0, "xi_{} < eta_{} fails", k + 1, k + 2);
        }
    }
}

#[test]
fn eval_reproduces_known_low_order_values() {
    let o = qzeta(&["eval", "zeta_q", "--s", "2", "--q", "0.5"]);
    assert_eq!(code(&o), 0, "stderr: {}", stderr(&o));
    let v: f64 = json_str_field(&stdout(&o), "value").parse().unwrap();
    assert!((v - 1.0 / 7.0).abs() < 1e-12, "zeta_q(2) = {v}");

    let o = qzeta(&["eval", "eta_q", "--s", "2", "--q", "0.5"]);
    assert_eq!(code(&o), 0);
    let v: f64 = json_str_field(&stdout(&o), "value").parse().unwrap();
    assert!((v - 1.0 / 42.0).abs() < 1e-12, "eta_q(2) = {v}");

    let o = qzeta(&["eval", "sigma", "--s", "2", "--a", "1/2", "--q", "0.5", "--digits", "30"]);
    assert_eq!(code(&o), 0);
    let v: f64 = json_str_field(&stdout(&o), "value").parse().unwrap();
    assert!((v - 4.0 / 7.0).abs() < 1e-12, "sigma_2(1/2) = {v}");
}

#[test]
fn eval_divergent_point_exits_with_continuation_hint() {
    let o = qzeta(&["eval", "zeta_q", "--s", "0.5", "--q", "0.5"]);
    assert_eq!(code(&o), 3);
    assert!(
        stderr(&o).contains("continued"),
        "divergence error should point at the continued evaluator: {}",
        stderr(&o)
    );
}

#[test]
fn eval_pole_and_missing_argument_are_distinct_failures() {
    let o = qzeta(&["eval", "hurwitz", "--s", "1", "--a", "3/4", "--q", "0.5", "--K", "14"]);
    assert_eq!(code(&o), 3, "pole is a domain error");
    assert!(stderr(&o).contains("pole"));

    let o = qzeta(&["eval", "H_q", "--s", "2.5", "--q", "0.5"]);
    assert_eq!(code(&o), 2, "missing --a is a config error");
}

#[test]
fn numbers_match_published_low_order_forms() {
    let o = qzeta(&["numbers", "euler", "--n", "1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("\"plain\":\"-1/2\""), "E~_1: {}", stdout(&o));

    let o = qzeta(&["numbers", "bernoulli", "--n", "2", "--q", "1/2", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("3/28"), "beta_2(1/2): {out}");
    assert!(out.contains("(1/4*q + 1/4*q^2)/(1 + q + q^2)"), "beta_2 text: {out}");

    let o = qzeta(&["numbers", "genocchi", "--n", "2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("\"plain\":\"-1/2 - 1/2*q\""), "G_2: {}", stdout(&o));

    let o = qzeta(&["numbers", "bernoulli", "--n", "33"]);
    assert_eq!(code(&o), 2, "the export cap is 32");
}

#[test]
fn verify_example_invocation_passes_and_writes_report() {
    let dir = std::env::temp_dir().join("qzeta-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let report = dir.join("report.json");
    let o = qzeta(&[
        "verify",
        "--q",
        "0.5",
        "--tol",
        "1e-20",
        "--digits",
        "60",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "stderr: {}", stderr(&o));
    let body = std::fs::read_to_string(&report).unwrap();
    assert!(
        body.contains("\"all_pass\": true"),
        "report: {}",
        &body[..body.len().min(400)]
    );
    assert!(body.contains("\"disputed\":"), "disputed rows must be reported");
}

#[test]
fn verify_rejects_untenable_tolerance() {
    let o = qzeta(&["verify", "--q", "0.5", "--tol", "1e-40", "--digits", "40"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn limits_reports_observation_without_asserting() {
    let o = qzeta(&["limits", "--format", "csv"]);
    assert_eq!(code(&o), 0, "stderr: {}", stderr(&o));
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().skip(1).filter(|l| !l.is_empty()).collect();
    assert_eq!(rows.len(), 2);
    // The chain pins the value to 1/2 for every q < 1; the observation should
    // sit on that candidate and far from log(2)/pi.
    for r in rows {
        let f: Vec<&str> = r.split(',').collect();
        let gap_half: f64 = f[4].parse().unwrap();
        let gap_log: f64 = f[5].parse().unwrap();
        assert!(gap_half < 1e-8, "observed value should hug 1/2: {r}");
        assert!(gap_log > 0.27, "gap to log(2)/pi should stay wide: {r}");
    }
}
