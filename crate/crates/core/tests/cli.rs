use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grassmannian"))
        .args(args)
        .env_remove("GRASSMANN_THREADS")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = run(&full);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn csv_rows(args: &[&str]) -> Vec<Vec<String>> {
    let mut full = vec!["--format", "csv"];
    full.extend_from_slice(args);
    let out = run(&full);
    assert_eq!(out.status.code(), Some(0));
    csv::Reader::from_reader(out.stdout.as_slice())
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["eval", "--p", "3", "--q", "2", "--t", "1/5,1/7", "--m", "2,1"]).status.code(), Some(0));
    assert_eq!(run(&["--help"]).status.code(), Some(0));

    let bad = run(&["eval", "--p", "1", "--q", "2", "--t", "0", "--m", "0"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("--p"));
    assert_eq!(run(&["eval", "--p", "3", "--q", "2", "--t", "1/5", "--m", "2,1"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["series", "--p", "3", "--q", "2", "--t", "1/5,1/7", "--k", "0"]).status.code(), Some(2));

    let irrational = run(&["eval", "--p", "3", "--q", "2", "--t", "1/5,1/7", "--m", "2,1", "--mode", "oracle"]);
    assert_eq!(irrational.status.code(), Some(1));
    let confluent = run(&["eval", "--p", "3", "--q", "2", "--t", "1/6,1/6", "--m", "2,1", "--mode", "generic"]);
    assert_eq!(confluent.status.code(), Some(1));

    assert_eq!(run(&["check", "--suite", "calibration"]).status.code(), Some(0));
}

#[test]
fn eval_examples() {
    let v = json(&["eval", "--p", "2", "--q", "2", "--t", "1/6,1/6", "--m", "1,0"]);
    let value = v["results"]["result"]["value"].as_f64().unwrap();
    assert!((value - 0.5).abs() < 1e-12);

    let v = json(&["eval", "--p", "4", "--q", "4", "--nodes", "1,1,1,1", "--m", "0,0,0,0", "--mode", "oracle"]);
    assert_eq!(v["results"]["exact"], "1");
    assert_eq!(v["calibration"]["raw_derivative_constant"], "1/12");
}

#[test]
fn json_and_csv_agree() {
    let args = ["sweep", "--p", "3", "--q", "2", "--t", "1/5,1/7", "--nmax", "12", "--kind", "regular"];
    let v = json(&args);
    let rows = csv_rows(&args);
    let ratios = v["results"]["max_ratio_per_shell"].as_array().unwrap();
    assert_eq!(ratios.len(), rows.len());
    for (r, row) in ratios.iter().zip(&rows) {
        assert_eq!(r.as_f64().unwrap(), row[1].parse::<f64>().unwrap());
    }

    let args = ["series", "--p", "3", "--q", "2", "--t", "1/5,1/7", "--k", "2", "--nmax", "20"];
    let v = json(&args);
    let rows = csv_rows(&args);
    let sums = v["results"]["shell_sums"].as_array().unwrap();
    assert_eq!(sums.len(), rows.len());
    for (s, row) in sums.iter().zip(&rows) {
        assert_eq!(s.as_f64().unwrap(), row[1].parse::<f64>().unwrap());
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let args = |t: &'static str| {
        ["--threads", t, "--format", "json", "series", "--p", "4", "--q", "3", "--t", "1/5,1/7,2/9", "--k", "1", "--nmax", "18"]
    };
    let one = run(&args("1"));
    let three = run(&args("3"));
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, three.stdout);

    let env = Command::new(env!("CARGO_BIN_EXE_grassmannian"))
        .args(&args("1")[2..])
        .env("GRASSMANN_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(env.stdout, one.stdout);
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("thresholds.json");
    let out = run(&["--format", "json", "--output", path.to_str().unwrap(), "thresholds", "--p", "3", "--q", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["results"]["k_main"], 6);
    assert_eq!(v["results"]["k_prior"], 3);
}

#[test]
fn kmin_text_and_normalizer() {
    let out = run(&["kmin", "--p", "2", "--q", "2", "--t", "1/2,1/2", "--kcap", "4", "--nmax", "20"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("none <= 4"));

    let v = json(&["classify", "--p", "2", "--q", "2", "--t", "1/2,1/2"]);
    assert_eq!(v["point"]["in_normalizer"], true);
}
