use std::io::Write;
use std::process::{Command, Output, Stdio};

fn andor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_andor")).args(args).env_remove("ANDOR_CACHE_DIR").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_body(o: &Output) -> Vec<String> {
    let s = stdout(o);
    let mut lines = s.lines();
    assert!(lines.next().unwrap().starts_with("# config={"));
    lines.map(str::to_string).collect()
}

#[test]
fn count_matches_known_series() {
    let o = andor(&["count", "--n", "1", "--max-size", "5"]);
    assert!(o.status.success());
    assert_eq!(csv_body(&o), ["m,a_hat,a_total", "1,2,2", "2,0,0", "3,4,8", "4,8,16", "5,32,64"]);
}

#[test]
fn dist_rows_sum_to_one() {
    let o = andor(&["dist", "--n", "1", "--m", "3"]);
    assert!(o.status.success());
    let body = csv_body(&o);
    assert_eq!(body[0], "truth_table_hex,count_and,count_or,probability");
    assert_eq!(body.len(), 5);
    assert!(body[1..].iter().all(|r| r.ends_with(",1/4")));
}

#[test]
fn complexity_all_is_the_golden_table() {
    let o = andor(&["complexity", "--n", "2", "--all", "--budget", "9"]);
    assert!(o.status.success());
    let body = csv_body(&o);
    assert_eq!(body[7], "6,7,16");
    assert_eq!(body[4], "3,2,");
    assert_eq!(body.len(), 17);
}

#[test]
fn analyze_reports_exact_value() {
    let o = andor(&["analyze", "--family", "nonleaf_subtrees", "--params", "l=1", "--n", "3"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["exact"].as_str().unwrap().contains("sqrt(6)"));
    assert_eq!(v["config"]["n"], 3);
    assert_eq!(v["asymptotic_reference"], 0.25);

    let o = andor(&["analyze", "--family", "no_first_level_leaf", "--n", "2", "--precision-bits", "128"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["exact"].is_null());
    assert!((v["float"].as_f64().unwrap() - 0.055).abs() < 1e-15);
}

#[test]
fn limit_reports_estimate() {
    let o = andor(&["limit", "--n", "1", "--f", "3", "--m", "30"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["M"], 30);
    assert!(v["estimate"].as_f64().unwrap() > 0.3);
}

#[test]
fn sample_is_deterministic() {
    let args = ["sample", "--n", "2", "--m", "15", "--seed", "9", "--emit-trees", "5"];
    let a = andor(&args);
    let b = andor(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let body = csv_body(&a);
    assert_eq!(body.len(), 5);
    for t in &body {
        let tree = andor::formula::parse_formula(t, 2).unwrap();
        assert_eq!(tree.size(), 15);
    }
}

#[test]
fn sample_report_has_requested_stats() {
    let o = andor(&["sample", "--n", "2", "--m", "30", "--trials", "200", "--stats", "tautology_rate,function_frequency:f"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let names: Vec<&str> = v["estimates"].as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"tautology_rate"));
    assert_eq!(v["trials"], 200);
}

#[test]
fn reduce_reads_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_andor")).arg("reduce").stdin(Stdio::piped()).stdout(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(b"(and x1 x2 (or x3 ~x3))\n(or x1 x2)\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success());
    assert_eq!(stdout(&o), "(and x1 x2)\n(or x1 x2)\n");
}

#[test]
fn verify_exact_suite_passes() {
    let o = andor(&["verify", "--suite", "exact"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 6);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(andor(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(andor(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(andor(&["limit", "--n", "1", "--f", "zz"]).status.code(), Some(2));
    assert_eq!(andor(&["sample", "--format", "csv"]).status.code(), Some(2));
    assert_eq!(andor(&["analyze", "--family", "no_such_family"]).status.code(), Some(2));
}

#[test]
fn config_file_sits_between_flags_and_defaults() {
    let dir = std::env::temp_dir().join(format!("andor-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.conf");
    std::fs::write(&cfg, "# run settings\nn = 1\nmax-size = 4\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    assert_eq!(csv_body(&andor(&["count", "--config", cfg])).len(), 5);
    let body = csv_body(&andor(&["count", "--config", cfg, "--max-size", "3"]));
    assert_eq!(body.last().unwrap(), "3,4,8");
    std::fs::write(dir.join("bad.conf"), "colour = blue\n").unwrap();
    assert_eq!(andor(&["count", "--config", dir.join("bad.conf").to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn cache_dir_round_trips() {
    let dir = std::env::temp_dir().join(format!("andor-cache-{}", std::process::id()));
    let run = |max: &str| {
        Command::new(env!("CARGO_BIN_EXE_andor")).args(["count", "--n", "2", "--max-size", max]).env("ANDOR_CACHE_DIR", &dir).output().unwrap()
    };
    let fresh = csv_body(&run("12"));
    assert!(dir.join("a_hat_n2.txt").exists());
    let cached = csv_body(&run("8"));
    assert_eq!(&fresh[..9], &cached[..]);
    let plain = csv_body(&andor(&["count", "--n", "2", "--max-size", "12"]));
    assert_eq!(fresh, plain);
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("andor-out-{}.csv", std::process::id()));
    let o = andor(&["count", "--n", "1", "--max-size", "3", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().contains("3,4,8"));
}
