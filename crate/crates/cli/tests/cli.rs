use serde_json::Value;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbicrystal")).args(args).output().expect("binary runs")
}

fn run_env(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbicrystal"))
        .args(args)
        .env("ORBICRYSTAL_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("bad json ({e}): {}", stdout(o)))
}

/// CSV data rows (config comment and header skipped).
fn csv_rows(o: &Output) -> Vec<Vec<String>> {
    stdout(o).lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn zseries_single_box_row() {
    let o = run(&["zseries", "--model", "first", "--a", "1", "--b", "1", "--u", "1/2", "--qdeg", "3", "--output", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[1], vec!["1", "1", "4/9"]);
}

#[test]
fn zseries_degree_zero_is_one() {
    let o = run(&["zseries", "--u", "1/2", "--qdeg", "0", "--output", "csv"]);
    assert_eq!(csv_rows(&o), vec![vec!["0", "1", "1"]]);
}

#[test]
fn zseries_second_model_matches_at_unit_degrees() {
    let o = run(&["zseries", "--model", "second", "--u", "1/2", "--qdeg", "3", "--output", "csv"]);
    assert_eq!(csv_rows(&o)[1], vec!["1", "1", "4/9"]);
}

#[test]
fn zseries_json_shape() {
    let o = run(&["zseries", "--u", "1/2", "--qdeg", "2", "--charge", "1", "--jet-order", "1", "--jet-symbols", "1"]);
    let v = json(&o);
    assert_eq!(v["schema"], "orbicrystal.zseries/1");
    assert_eq!(v["offset"], 1);
    assert_eq!(v["config"]["u"], "1/2");
    let c = v["coefficients"].as_array().unwrap();
    assert_eq!(c.len(), 3);
    assert_eq!(c[0][0]["monomial"], "1");
    // the jet carries a linear t_1 term at every Q-power
    assert!(c[1].as_array().unwrap().len() >= 2);
}

#[test]
fn lax_check_is_exact() {
    let o = run(&["check", "lax", "--a", "2", "--b", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v = json(&o);
    assert_eq!(v["schema"], "orbicrystal.check/1");
    assert_eq!(v["status"], "pass");
    for r in v["reports"].as_array().unwrap() {
        assert_eq!(r["status"], "pass");
        assert_eq!(r["max_residual"], "0");
        for key in ["check", "parameters", "status", "max_residual", "residuals_by_cutoff"] {
            assert!(r.get(key).is_some(), "missing {key}");
        }
    }
}

#[test]
fn cauchy_check_passes() {
    let o = run(&["check", "cauchy", "--a", "1", "--b", "2", "--qdeg", "6"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["reports"].as_array().unwrap().len(), 2);
}

#[test]
fn theorem1_residuals_decay() {
    let o = run(&["check", "theorem1", "--a", "2", "--b", "1", "--cutoffs", "16,24"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    for r in json(&o)["reports"].as_array().unwrap() {
        let res: Vec<f64> = r["residuals_by_cutoff"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| c["residual"].as_str().unwrap().parse().unwrap())
            .collect();
        assert_eq!(res.len(), 2);
        assert!(res[1] * 10.0 <= res[0], "{res:?}");
        assert!(res[1] < 1e-20);
    }
}

#[test]
fn approximate_csv_has_precision_column() {
    let o = run(&["check", "ufactor", "--a", "1", "--b", "1", "--u", "1/3", "--window=-4,4", "--output", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == "check,status,exact,cutoff,residual,precision_bits"));
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r[2] == "false" && r[5] == "256"));
}

#[test]
fn unconverged_factorization_fails_with_exit_one() {
    // q close to 1: the tail cutoffs are far too short for the series
    let o = run(&["check", "ufactor", "--a", "2", "--b", "1", "--u", "9/10", "--q0", "9/10", "--window=-6,6"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["status"], "fail");
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let args = ["check", "fermionic", "--a", "2", "--b", "1", "--qdeg", "4"];
    let one = run_env(&args, "1");
    let many = run_env(&args, "3");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, many.stdout);
    let approx = ["check", "ufactor", "--u", "1/3", "--window=-4,4", "--output", "csv"];
    assert_eq!(run_env(&approx, "1").status.code(), Some(0));
    assert_eq!(run_env(&approx, "1").stdout, run_env(&approx, "2").stdout);
}

#[test]
fn seed_draws_reproducible_parameters() {
    let args = ["zseries", "--a", "2", "--b", "1", "--qdeg", "2", "--seed", "7"];
    let x = run(&args);
    assert_eq!(x.stdout, run(&args).stdout);
    let p = json(&x)["config"]["p"].clone();
    assert_eq!(p.as_array().unwrap().len(), 2);
}

#[test]
fn configuration_errors_exit_two() {
    for args in [
        vec!["zseries", "--u", "abc"],
        vec!["zseries", "--a", "0"],
        vec!["zseries", "--u", "1"],
        vec!["check", "nosuch"],
        vec!["check", "lax", "--window=3"],
        vec!["check", "tangency", "--a", "2", "--k", "1"],
        vec!["check", "theorem1", "--u", "3"],
        vec!["zseries", "--a", "2", "--p", "1"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stdout(&o));
        assert!(o.stdout.is_empty());
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn help_exits_zero() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("zseries"));
}
