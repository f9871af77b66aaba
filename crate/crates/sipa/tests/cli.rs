//! End-to-end tests of the command-line interface, exercising the binary
//! the way a user would: generate a matrix, reconstruct, compare, sweep.

use std::path::Path;
use std::process::Command;

fn sipa() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sipa"))
}

#[test]
fn gen_writes_parseable_alist() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a1.alist");
    let status = sipa()
        .args(["gen", "--gamma", "3", "--rho", "7", "--n", "700", "--m", "300", "--seed", "1"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let graph = sipa::tanner::from_alist(&text).unwrap();
    assert_eq!(graph.n(), 700);
    assert_eq!(graph.m(), 300);
    assert_eq!(graph.num_edges(), 2100);
}

#[test]
fn gen_rejects_unbalanced_degrees() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bad.alist");
    let output = sipa()
        .args(["gen", "--gamma", "3", "--rho", "7", "--n", "700", "--m", "400", "--seed", "1"])
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("degree balance"));
    assert!(!out.exists());
}

fn write_matrix(dir: &Path) -> std::path::PathBuf {
    let out = dir.join("m.alist");
    let status = sipa()
        .args(["gen", "--gamma", "3", "--rho", "7", "--n", "70", "--m", "30", "--seed", "4"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    out
}

#[test]
fn run_reports_success_and_honors_expectation() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = write_matrix(dir.path());
    let output = sipa()
        .arg("run")
        .arg("--matrix")
        .arg(&matrix)
        .args(["--variant", "sipa", "--k", "3", "--seed", "5", "--expect-success"])
        .output()
        .unwrap();
    assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(report["k"], 3);
    assert_eq!(report["success"], true);
    assert_eq!(report["x_hat"].as_array().unwrap().len(), 70);
}

#[test]
fn run_requires_a_sparsity_argument() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = write_matrix(dir.path());
    let output = sipa()
        .arg("run")
        .arg("--matrix")
        .arg(&matrix)
        .args(["--variant", "fipa"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn run_missing_matrix_is_a_usage_error() {
    let output = sipa()
        .args(["run", "--matrix", "/nonexistent/m.alist", "--variant", "fipa", "--k", "1"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn run_emits_trace_when_requested() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = write_matrix(dir.path());
    let trace = dir.path().join("trace.txt");
    let status = sipa()
        .arg("run")
        .arg("--matrix")
        .arg(&matrix)
        .args(["--variant", "fipa", "--k", "2", "--seed", "1"])
        .arg("--trace")
        .arg(&trace)
        .stdout(std::process::Stdio::null())
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&trace).unwrap();
    let first = text.lines().next().unwrap();
    assert_eq!(first.split_whitespace().count(), 7, "line: {first}");
}

#[test]
fn compare_reports_clean_invariants() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = write_matrix(dir.path());
    let output = sipa()
        .arg("compare")
        .arg("--matrix")
        .arg(&matrix)
        .args(["--k", "4", "--seed", "2"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8_lossy(&output.stdout);
    assert!(text.contains("bound dominance violations"), "stdout: {text}");
    assert!(text.contains("recovery containment (fipa success implies sipa success): ok"));
}

#[test]
fn bench_writes_result_files() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = write_matrix(dir.path());
    let out_dir = dir.path().join("results");
    let output = sipa()
        .arg("bench")
        .arg("--matrix")
        .arg(&matrix)
        .args(["--sparsities", "0.03,0.06", "--trials", "20", "--seed", "9"])
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));
    let listed: Vec<_> = String::from_utf8_lossy(&output.stdout).lines().map(String::from).collect();
    assert!(!listed.is_empty());
    for f in &listed {
        assert!(Path::new(f).exists(), "missing output {f}");
    }
    let table = listed.iter().find(|f| f.ends_with("_table.csv")).unwrap();
    let table = std::fs::read_to_string(table).unwrap();
    assert!(table.starts_with("sparsity,cn_to_vn_fld"));
    assert_eq!(table.lines().count(), 3);
}

#[test]
fn bench_is_deterministic_in_seed() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = write_matrix(dir.path());
    let mut json = Vec::new();
    for sub in ["a", "b"] {
        let out_dir = dir.path().join(sub);
        let output = sipa()
            .arg("bench")
            .arg("--matrix")
            .arg(&matrix)
            .args(["--sparsities", "0.06", "--trials", "30", "--seed", "3"])
            .arg("--out")
            .arg(&out_dir)
            .output()
            .unwrap();
        assert!(output.status.success());
        let listed = String::from_utf8_lossy(&output.stdout);
        let path = listed.lines().find(|f| f.ends_with(".json")).unwrap();
        json.push(std::fs::read_to_string(path).unwrap());
    }
    assert_eq!(json[0], json[1]);
}

#[test]
fn oracle_finds_planted_support() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.alist");
    let status = sipa()
        .args(["gen", "--gamma", "2", "--rho", "3", "--n", "15", "--m", "10", "--seed", "2"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let output = sipa()
        .arg("oracle")
        .arg("--matrix")
        .arg(&out)
        .args(["--k", "2", "--seed", "9"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert!(report["min_support"].as_u64().unwrap() <= 2);
    assert!(!report["solutions"].as_array().unwrap().is_empty());
}
