use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rainbow_cli::{run_experiment, ExperimentConfig, Output as Report, Task};

fn rainbow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rainbow")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(csv_text: &str) -> Vec<Vec<String>> {
    csv::Reader::from_reader(csv_text.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

fn header(csv_text: &str) -> Vec<String> {
    csv_text.lines().next().unwrap().split(',').map(str::to_string).collect()
}

#[test]
fn threshold_of_a_pair() {
    let o = rainbow(&["threshold", "--gen", "single-edge:2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let value: f64 = rows(&text)[0][1].parse().unwrap();
    assert!((value - 0.5f64.sqrt()).abs() < 1e-7);
}

#[test]
fn malformed_input_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    fs::write(&path, "a,b*x\n").unwrap();
    let o = rainbow(&["threshold", "--input", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("parse error"));
    assert_eq!(rainbow(&["threshold", "--tol", "2", "--gen", "single-edge:2"]).status.code(), Some(1));
    assert_eq!(rainbow(&["threshold", "--gen", "nonsense:3"]).status.code(), Some(1));
    assert_eq!(rainbow(&["--bogus-flag"]).status.code(), Some(1));
}

#[test]
fn failed_verification_exits_with_two() {
    let o = rainbow(&["spread", "--gen", "hamilton:4", "--kappa", "1.3"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(rows(&stdout(&o))[0][6], "false");
    let ok = rainbow(&["spread", "--gen", "hamilton:4", "--kappa", "1.2"]);
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn lift_reports_sizes_and_checks() {
    let o = rainbow(&["lift", "--gen", "matchings:6", "--k", "4", "--verify-spread", "3", "--verify-spiro", "0.1666,3,1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let row = &rows(&stdout(&o))[0];
    assert_eq!(row[2], "15");
    assert_eq!(row[4], (15 * 24).to_string());
    assert_eq!(row[7], "true");
    assert_eq!(row[13], "true");
}

#[test]
fn couple_csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = rainbow(&[
            "couple", "--gen", "hamilton:4", "--k", "4", "--p", "0.6,0.9", "--samples", "3000", "--seed", "11", "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let h = header(&text);
    for col in ["estimate", "stderr", "samples", "seed"] {
        assert!(h.iter().any(|c| c == col), "missing column {col}");
    }
    assert_eq!(rows(&text).len(), 2 * 7);
}

#[test]
fn config_files_drive_the_same_tasks() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"task": "chain-check", "count": 3, "seed": 5}"#).unwrap();
    let first = rainbow(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    let again = rainbow(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(first.stdout, again.stdout);
    let table = rows(&stdout(&first));
    assert!(!table.is_empty());
    assert!(table.iter().all(|r| r[8] == "true"));
    let reseeded = rainbow(&["--config", cfg.to_str().unwrap(), "--seed", "6"]);
    assert_ne!(first.stdout, reseeded.stdout);

    fs::write(&cfg, r#"{"task": "couple", "generator": "single-edge:2", "k": 2}"#).unwrap();
    assert_eq!(rainbow(&["--config", cfg.to_str().unwrap()]).status.code(), Some(1));
    fs::write(&cfg, r#"{"task": "threshold", "generator": "single-edge:2", "colour": 3}"#).unwrap();
    assert_eq!(rainbow(&["--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn generated_text_reads_back() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c5.txt");
    let o = rainbow(&["generate", "hamilton:5", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let q = rainbow(&["spread", "--input", path.to_str().unwrap()]);
    let direct = rainbow(&["spread", "--gen", "hamilton:5"]);
    assert_eq!(q.stdout, direct.stdout);
    assert!(Path::new(&path).exists());
}

#[test]
fn library_runs_without_the_binary() {
    let mut cfg = ExperimentConfig::new(Task::Qf);
    cfg.generator = Some("single-edge:1".into());
    let report = run_experiment(&cfg).unwrap();
    assert!(report.verified);
    let Report::Csv(table) = report.output else { panic!("expected a table") };
    let value: f64 = table.rows[0][0].parse().unwrap();
    assert!((value - 0.5).abs() < 1e-6);
}
