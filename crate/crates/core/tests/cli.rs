use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn mtbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mtbound")).args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn generate(dir: &Path, kind: &str, n: &str, seed: &str, count: &str) -> Vec<PathBuf> {
    let out = mtbound(&["generate", "--n", n, "--kind", kind, "--seed", seed, "--count", count, "--out", s(dir)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    files
}

#[test]
fn generate_is_deterministic() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let fa = generate(a.path(), "complex", "4", "3", "3");
    let fb = generate(b.path(), "complex", "4", "3", "3");
    assert_eq!(fa.len(), 3);
    assert!(fa[0].file_name().unwrap().to_str().unwrap().starts_with("complex_n4_s"));
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap());
    }
}

#[test]
fn usage_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    assert_eq!(mtbound(&["generate", "--n", "0", "--out", s(dir.path())]).status.code(), Some(2));
    assert_eq!(mtbound(&["bogus"]).status.code(), Some(2));
    assert_eq!(mtbound(&["compare", "--dir", s(dir.path())]).status.code(), Some(2));
    let f = generate(dir.path(), "simple", "2", "1", "1");
    assert_eq!(mtbound(&["bound", "--instance", s(&f[0]), "--level", "7"]).status.code(), Some(2));
}

#[test]
fn linear_variant_refuses_arcs() {
    let dir = TempDir::new().unwrap();
    let f = generate(dir.path(), "generic", "2", "1", "1");
    let out = mtbound(&["bound", "--instance", s(&f[0]), "--variant", "linear", "--level", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = mtbound(&["bound", "--instance", s(&f[0]), "--variant", "sampling", "--level", "1"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn missing_and_malformed_files_exit_1() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.json");
    assert_eq!(mtbound(&["bound", "--instance", s(&missing)]).status.code(), Some(1));
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{ \"version\": 1,").unwrap();
    assert_eq!(mtbound(&["feasible", "--instance", s(&broken)]).status.code(), Some(1));
}

#[test]
fn impossible_instance_exits_3() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("far.json");
    let doc = r#"{"version":1,"units":{"length":"m","time":"s","speed":"m/s"},"kind":"simple","depot":[0,0],"v_max":1,"horizon":10,
      "targets":[{"id":1,"speed":0.1,"windows":[[0,1]],"pieces":[{"type":"line","start":[50,0],"end":[51,0],"t_start":0,"t_end":10}]}]}"#;
    std::fs::write(&path, doc).unwrap();
    assert_eq!(mtbound(&["feasible", "--instance", s(&path)]).status.code(), Some(3));
    assert_eq!(mtbound(&["bound", "--instance", s(&path), "--level", "1"]).status.code(), Some(3));
}

#[test]
fn bound_feasible_plot_pipeline() {
    let dir = TempDir::new().unwrap();
    let f = generate(dir.path(), "simple", "4", "2", "1");
    let inst = s(&f[0]);
    let lb = dir.path().join("lb.json");
    let report = dir.path().join("lb.csv");
    let out = mtbound(&["bound", "--instance", inst, "--variant", "linear", "--level", "2", "--out", s(&lb), "--report", s(&report)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&report).unwrap();
    assert!(csv.starts_with("schema_version,instance,n_targets,kind,variant,level,delta,lower_bound"));
    let lb_cost: f64 = csv.lines().nth(1).unwrap().split(',').nth(7).unwrap().parse().unwrap();

    let ub = dir.path().join("ub.json");
    let out = mtbound(&["feasible", "--instance", inst, "--out", s(&ub)]);
    assert_eq!(out.status.code(), Some(0));
    let ub_cost: f64 = String::from_utf8_lossy(&out.stdout).lines().nth(1).unwrap().split(',').nth(8).unwrap().parse().unwrap();
    assert!(lb_cost <= ub_cost + 1e-6, "{lb_cost} > {ub_cost}");

    let (svg_a, svg_b, svg_t) = (dir.path().join("a.svg"), dir.path().join("b.svg"), dir.path().join("t.svg"));
    for svg in [&svg_a, &svg_b] {
        assert_eq!(mtbound(&["plot", "--instance", inst, "--solution", s(&lb), "--out", s(svg)]).status.code(), Some(0));
    }
    let a = std::fs::read_to_string(&svg_a).unwrap();
    assert_eq!(a, std::fs::read_to_string(&svg_b).unwrap());
    assert_eq!(a.matches("class=\"leg\"").count(), 5);
    assert_eq!(mtbound(&["plot", "--instance", inst, "--solution", s(&ub), "--out", s(&svg_t)]).status.code(), Some(0));
    let t = std::fs::read_to_string(&svg_t).unwrap();
    assert_eq!(t.matches("class=\"tour\"").count(), 1);
    assert!(!t.contains("class=\"leg\""));
}

#[test]
fn compare_writes_rows_and_summary() {
    let dir = TempDir::new().unwrap();
    let inst_dir = dir.path().join("inst");
    std::fs::create_dir(&inst_dir).unwrap();
    generate(&inst_dir, "simple", "3", "5", "2");
    let (rows, summary) = (dir.path().join("rows.csv"), dir.path().join("summary.csv"));
    let out = mtbound(&[
        "compare", "--dir", s(&inst_dir), "--variants", "lite,linear", "--levels", "1,2", "--out", s(&rows), "--summary", s(&summary),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read_to_string(&rows).unwrap().lines().count(), 1 + 2 * 2 * 2);
    assert_eq!(std::fs::read_to_string(&summary).unwrap().lines().count(), 1 + 2 * 2);
}

#[test]
fn thread_cap_is_honoured() {
    let dir = TempDir::new().unwrap();
    let f = generate(dir.path(), "simple", "3", "9", "1");
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_mtbound"))
            .env("MTBOUND_THREADS", threads)
            .args(["bound", "--instance", s(&f[0]), "--variant", "geometric", "--level", "3"])
            .output()
            .unwrap()
    };
    let (one, many) = (run("1"), run("4"));
    assert_eq!(one.status.code(), Some(0));
    let lb = |o: &Output| String::from_utf8_lossy(&o.stdout).lines().nth(1).unwrap().split(',').nth(7).unwrap().to_string();
    assert_eq!(lb(&one), lb(&many));
}
