use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use everett_lab::cli::ReportFile;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_everett-lab"));
    c.env_remove("EVERETT_LAB_MAX_DIM");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const TOY: &str = r#"{"n_qubits": 3, "n_streams": 4, "observer": {"kind": "toy"}, "seed": 1}"#;

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn run_toy_report() {
    let dir = TempDir::new().unwrap();
    let sc = write(&dir, "toy.json", TOY);
    let out = dir.path().join("report.json");
    let o = run(&["run", s(&sc), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rep: ReportFile = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rep.run.rank_rho_s, 4);
    assert_eq!(rep.fs_dim, Some(4));
    for i in 0..8 {
        assert!((rep.run.rho_s.re[i][i] - 0.125).abs() < 1e-10);
    }
    assert!((rep.run.eigenvalues.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    assert!(rep.run.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    assert!(rep.tool_version.starts_with("everett-lab "));
    assert!(rep.perp_expectations.unwrap() < 1e-10);
}

#[test]
fn run_copenhagen_report_to_stdout() {
    let dir = TempDir::new().unwrap();
    let sc = write(
        &dir,
        "c.json",
        r#"{"n_qubits": 3, "n_streams": 4, "observer": {"kind": "toy"}, "theory": "copenhagen"}"#,
    );
    let o = run(&["run", s(&sc)]);
    assert_eq!(o.status.code(), Some(0));
    let rep: ReportFile = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rep.run.eigenvalues, vec![0.125; 8]);
}

#[test]
fn run_report_round_trips() {
    let dir = TempDir::new().unwrap();
    let sc = write(
        &dir,
        "r.json",
        r#"{"n_qubits": 3, "n_streams": 3, "observer": {"kind": "random", "dim": 2, "seed": 5}, "samples": 200}"#,
    );
    let o = run(&["run", s(&sc)]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rep: ReportFile = serde_json::from_str(&text).unwrap();
    assert!(rep.test.is_some());
    let again: ReportFile = serde_json::from_str(&serde_json::to_string(&rep).unwrap()).unwrap();
    assert_eq!(rep, again);
    let report = rep.run.to_report().unwrap();
    assert_eq!(report.rank_rho_s, rep.run.rank_rho_s);
}

#[test]
fn run_writes_samples_csv() {
    let dir = TempDir::new().unwrap();
    let sc = write(&dir, "toy.json", TOY);
    let csv = dir.path().join("samples.csv");
    let o = run(&["run", s(&sc), "--samples", "50", "--samples-csv", s(&csv), "--out", s(&dir.path().join("r.json"))]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("outcome,label"));
    assert_eq!(lines.count(), 50);
}

#[test]
fn run_honours_output_path_in_file() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("from_file.json");
    let body = format!(
        r#"{{"n_qubits": 3, "n_streams": 2, "observer": {{"kind": "toy"}}, "output_path": {:?}}}"#,
        s(&target)
    );
    let sc = write(&dir, "toy.json", &body);
    let o = run(&["run", s(&sc)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert!(target.exists());
}

#[test]
fn malformed_input_exits_one_without_report() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("never.json");
    for (name, body) in [
        ("broken.json", "{ not json"),
        ("unknown_kind.json", r#"{"n_qubits": 3, "n_streams": 1, "observer": {"kind": "cat"}}"#),
        ("zero_streams.json", r#"{"n_qubits": 3, "n_streams": 0, "observer": {"kind": "toy"}}"#),
        ("extra_key.json", r#"{"n_qubits": 3, "n_streams": 1, "observer": {"kind": "toy"}, "colour": 1}"#),
    ] {
        let sc = write(&dir, name, body);
        let o = run(&["run", s(&sc), "--out", s(&out)]);
        assert_eq!(o.status.code(), Some(1), "{name}");
        assert!(!out.exists(), "{name}");
        assert!(!o.stderr.is_empty());
    }
    let o = run(&["run", s(&dir.path().join("missing.json"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot read"));
}

#[test]
fn size_guard_refuses_and_can_be_raised() {
    let dir = TempDir::new().unwrap();
    let sc = write(
        &dir,
        "big.json",
        r#"{"n_qubits": 11, "n_streams": 1, "observer": {"kind": "random", "dim": 4}}"#,
    );
    let o = run(&["run", s(&sc)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("4096"));
    let small = write(
        &dir,
        "small.json",
        r#"{"n_qubits": 3, "n_streams": 1, "observer": {"kind": "random", "dim": 4}}"#,
    );
    let o = bin().args(["run", s(&small)]).env("EVERETT_LAB_MAX_DIM", "16").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = bin().args(["run", s(&small)]).env("EVERETT_LAB_MAX_DIM", "64").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn discriminate_toy() {
    let dir = TempDir::new().unwrap();
    let sc = write(&dir, "toy.json", TOY);
    let out = dir.path().join("pair.json");
    let o = run(&["discriminate", s(&sc), "--samples", "1000", "--alpha", "1e-6", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().last(), Some("DISCRIMINATED"));
    assert!(text.contains("everett: perp hits 0/1000"));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["discriminating"], true);
    assert_eq!(doc["everett_test"]["decision"], "collapse_rejected");
}

#[test]
fn discriminate_vacuous_warns() {
    let dir = TempDir::new().unwrap();
    let sc = write(
        &dir,
        "vac.json",
        r#"{"n_qubits": 2, "n_streams": 3, "observer": {"kind": "recording", "memory_qubits": 2}}"#,
    );
    let o = run(&["discriminate", s(&sc), "--samples", "100"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("warning: bound vacuous")));
    assert_eq!(text.lines().last(), Some("NOT DISCRIMINATED"));
}

#[test]
fn discriminate_rejects_zero_samples() {
    let dir = TempDir::new().unwrap();
    let sc = write(&dir, "toy.json", TOY);
    assert_eq!(run(&["discriminate", s(&sc), "--samples", "0"]).status.code(), Some(1));
    assert_eq!(run(&["discriminate", s(&sc), "--alpha", "2"]).status.code(), Some(1));
}

#[test]
fn toy_demo_is_stable() {
    let a = run(&["toy-demo"]);
    let b = run(&["toy-demo"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.matches("0.125000").count(), 8);
    for i in 1..=4 {
        assert!(text.contains(&format!("P(B_{i}) = 0.000000")));
    }
}

#[test]
fn scan_recorder() {
    let args = ["scan", "--observer", "recording:2", "--n-min", "1", "--n-max", "5", "--trials", "3", "--seed", "9"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("N,D,rank,trace_distance_to_mixed"));
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 15);
    for r in &rows {
        let n: u32 = r[0].parse().unwrap();
        assert_eq!(r[1], "4");
        if n >= 3 {
            assert!(r[2].parse::<usize>().unwrap() <= 4);
        }
    }
}

#[test]
fn scan_json_and_guard() {
    let o = run(&["scan", "--observer", "random:2", "--n-max", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 2);
    let o = run(&["scan", "--observer", "random:4", "--n-min", "12", "--n-max", "12"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["scan", "--observer", "bogus", "--n-max", "2"]);
    assert_eq!(o.status.code(), Some(1));
}
