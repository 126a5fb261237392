use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const CFG_A: &str = "N = 2
p1 = 1.5
p2 = 1.5
s1 = 1
s2 = 1
q1 = 8
q2 = 8
gamma1 = 4
gamma2 = 4
theta1 = 1/8
theta2 = 1/8
c_star = 1
";

const CFG_B_1D: &str = "N = 2
p1 = 2
p2 = 2
s1 = 0
s2 = 0
q1 = 4
q2 = 4
gamma1 = 2
gamma2 = 2
theta1 = 1/4
theta2 = 1/4
c_star = 0
dimension = 1
n = 257
";

fn write_config(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str], config: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quasivar"))
        .args(args)
        .arg("--config")
        .arg(config)
        .env_remove("QUASIVAR_THREADS")
        .output()
        .unwrap()
}

fn records(out: &Output) -> Vec<Value> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn of_kind<'a>(recs: &'a [Value], kind: &str) -> Vec<&'a Value> {
    recs.iter().filter(|r| r["record"] == kind).collect()
}

#[test]
fn check_exit_codes() {
    let dir = TempDir::new().unwrap();
    let a = write_config(&dir, "a.cfg", CFG_A);
    let out = run(&["check"], &a);
    assert_eq!(out.status.code(), Some(0));
    let recs = records(&out);
    assert_eq!(recs[0]["record"], "header");
    assert_eq!(recs[0]["command"], "check");
    let exj02 = of_kind(&recs, "hypothesis")
        .into_iter()
        .find(|r| r["id"] == "exj02[1,2]")
        .unwrap();
    assert_eq!(exj02["exact"], "5/4");

    let gamma5 = CFG_A
        .replace("gamma1 = 4", "gamma1 = 5")
        .replace("gamma2 = 4", "gamma2 = 5");
    let g5 = write_config(&dir, "g5.cfg", &gamma5);
    let out = run(&["check"], &g5);
    assert_eq!(out.status.code(), Some(1));
    let recs = records(&out);
    let summary = of_kind(&recs, "check")[0];
    assert!(summary["failing"]
        .as_array()
        .unwrap()
        .iter()
        .any(|f| f.as_str().unwrap().starts_with("exj02")));

    let bad = write_config(&dir, "bad.cfg", &format!("{CFG_A}p3 = 2\n"));
    let out = run(&["check"], &bad);
    assert_eq!(out.status.code(), Some(2));
    let recs = records(&out);
    assert_eq!(recs.last().unwrap()["record"], "error");
}

#[test]
fn missing_config_is_a_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_quasivar"))
        .arg("check")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gradcheck_passes_on_reference_configs() {
    let dir = TempDir::new().unwrap();
    let a = format!("{CFG_A}n = 33\n");
    let b = CFG_B_1D.replace("dimension = 1\nn = 257", "dimension = 2\nn = 33");
    for (name, text) in [("a.cfg", a), ("b.cfg", b)] {
        let cfg = write_config(&dir, name, &text);
        let out = run(&["gradcheck"], &cfg);
        assert_eq!(out.status.code(), Some(0), "{name}");
        let recs = records(&out);
        assert_eq!(of_kind(&recs, "gradcheck").len(), 5);
        assert_eq!(of_kind(&recs, "zero_field")[0]["pass"], true);
        assert_eq!(of_kind(&recs, "additivity")[0]["pass"], true);
    }
}

#[test]
fn eigen_matches_pi_squared_and_dumps_field() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "b.cfg", CFG_B_1D);
    let out_dir = dir.path().join("fields");
    let out = run(
        &[
            "eigen",
            "--grid-n",
            "1025",
            "--out",
            out_dir.to_str().unwrap(),
        ],
        &cfg,
    );
    assert_eq!(out.status.code(), Some(0));
    let recs = records(&out);
    let eig = of_kind(&recs, "eigen")[0];
    let pi2 = std::f64::consts::PI.powi(2);
    let lambda = eig["lambda1"].as_f64().unwrap();
    assert!((lambda - pi2).abs() / pi2 < 1e-3, "{lambda}");
    let dump = std::fs::read_to_string(out_dir.join("phi1_1.txt")).unwrap();
    assert_eq!(dump.lines().count(), 1025);
}

#[test]
fn solve_reports_converged_positive_level() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "b.cfg", CFG_B_1D);
    let out = run(&["solve"], &cfg);
    assert_eq!(out.status.code(), Some(0));
    let recs = records(&out);
    assert_eq!(of_kind(&recs, "certificate")[0]["validated"], true);
    let cand = of_kind(&recs, "candidate")[0];
    assert_eq!(cand["converged"], true);
    assert!(cand["level"].as_f64().unwrap() > 0.0);
    assert_eq!(cand["verified"], true);
}

#[test]
fn multi_finds_distinct_increasing_levels() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "b.cfg", CFG_B_1D);
    let out = run(&["multi"], &cfg);
    assert_eq!(out.status.code(), Some(0));
    let recs = records(&out);
    let levels: Vec<f64> = of_kind(&recs, "candidate")
        .iter()
        .map(|c| c["level"].as_f64().unwrap())
        .collect();
    assert!(levels.len() >= 2, "{levels:?}");
    assert!(levels.windows(2).all(|w| w[0] < w[1]), "{levels:?}");
}

#[test]
fn quiet_prints_only_the_summary() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "a.cfg", CFG_A);
    let out = run(&["check", "--quiet"], &cfg);
    let recs = records(&out);
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0]["record"], "check");
}

#[test]
fn output_is_reproducible_up_to_timestamp() {
    fn strip(out: &Output) -> Vec<u8> {
        let text = String::from_utf8(out.stdout.clone()).unwrap();
        let mut kept = Vec::new();
        for line in text.split_inclusive('\n') {
            match line.find(",\"timestamp\":\"") {
                Some(start) => {
                    let rest = &line[start + 14..];
                    let end = rest.find('"').unwrap();
                    kept.extend_from_slice(&line.as_bytes()[..start]);
                    kept.extend_from_slice(rest[end + 1..].as_bytes());
                }
                None => kept.extend_from_slice(line.as_bytes()),
            }
        }
        kept
    }
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "b.cfg", CFG_B_1D);
    let first = run(&["multi", "--seed", "11"], &cfg);
    let second = Command::new(env!("CARGO_BIN_EXE_quasivar"))
        .args(["multi", "--seed", "11", "--config"])
        .arg(&cfg)
        .env("QUASIVAR_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(strip(&first), strip(&second));
    let text = String::from_utf8(first.stdout).unwrap();
    assert!(text.lines().next().unwrap().contains("\"seed\":11"));
}
