use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_admm-paths");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    for problem in ["lasso", "rrr", "cluster"] {
        let a = tmp.path().join(format!("{problem}-a"));
        let b = tmp.path().join(format!("{problem}-b"));
        for dir in [&a, &b] {
            let out = run(&[
                "gen",
                "--problem",
                problem,
                "--seed",
                "11",
                "--out",
                path_str(dir),
            ]);
            assert!(
                out.status.success(),
                "{}",
                String::from_utf8_lossy(&out.stderr)
            );
        }
        let mut names: Vec<_> = std::fs::read_dir(&a)
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        assert!(names.iter().any(|n| n == "spec.json"));
        for name in names {
            assert_eq!(
                std::fs::read(a.join(&name)).unwrap(),
                std::fs::read(b.join(&name)).unwrap(),
                "{problem}/{name:?}"
            );
        }
    }
}

#[test]
fn gen_writes_expected_files() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path().join("rrr");
    assert!(run(&[
        "gen",
        "--problem",
        "rrr",
        "--n",
        "12",
        "--p",
        "6",
        "--q",
        "4",
        "--s",
        "2",
        "--out",
        path_str(&d)
    ])
    .status
    .success());
    let x = std::fs::read_to_string(d.join("X.csv")).unwrap();
    assert_eq!(x.lines().count(), 13);
    assert_eq!(x.lines().next().unwrap().split(',').count(), 6);
    assert!(d.join("Y.csv").exists() && d.join("B_star.csv").exists());
}

#[test]
fn invalid_dimensions_exit_with_validation_code() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&[
        "gen",
        "--problem",
        "lasso",
        "--p",
        "5",
        "--s",
        "9",
        "--out",
        path_str(tmp.path()),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let d = tmp.path().join("d");
    assert!(run(&["gen", "--problem", "lasso", "--out", path_str(&d)])
        .status
        .success());
    let out = run(&[
        "path",
        "--data",
        path_str(&d),
        "--problem",
        "lasso",
        "--t=-1",
        "--out",
        path_str(tmp.path()),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_data_exits_with_io_code() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&[
        "path",
        "--problem",
        "lasso",
        "--data",
        path_str(&tmp.path().join("nope")),
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn lasso_one_step_path_reaches_full_sparsity() {
    let tmp = tempfile::tempdir().unwrap();
    let (d, r) = (tmp.path().join("d"), tmp.path().join("r"));
    assert!(run(&[
        "gen",
        "--problem",
        "lasso",
        "--seed",
        "7",
        "--out",
        path_str(&d)
    ])
    .status
    .success());
    let out = run(&[
        "path",
        "--data",
        path_str(&d),
        "--problem",
        "lasso",
        "--t",
        "0.01",
        "--gamma0",
        "1e-4",
        "--out",
        path_str(&r),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rep = report(&r);
    assert_eq!(rep["terminated"], "fully_sparse");
    assert_eq!(rep["final_sparsity"], 0);
    assert_eq!(rep["points"], rep["total_rounds"]);
    assert!(rep["true_before_false"].as_u64().unwrap() <= 5);
    let printed: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(printed["total_rounds"], rep["total_rounds"]);
    let csv = std::fs::read_to_string(r.join("path.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "k,gamma,sparsity,active_set_hash,rounds"
    );
    assert_eq!(
        csv.lines().count() as u64,
        rep["points"].as_u64().unwrap() + 1
    );
}

#[test]
fn warm_start_grid_ends_at_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let (d, r) = (tmp.path().join("d"), tmp.path().join("r"));
    assert!(run(&["gen", "--problem", "lasso", "--out", path_str(&d)])
        .status
        .success());
    let out = run(&[
        "path",
        "--data",
        path_str(&d),
        "--problem",
        "lasso",
        "--driver",
        "warmstart",
        "--grid-size",
        "2",
        "--full",
        "--out",
        path_str(&r),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let path: Value =
        serde_json::from_str(&std::fs::read_to_string(r.join("path.json")).unwrap()).unwrap();
    let pts = path["points"].as_array().unwrap();
    assert_eq!(pts.len(), 2);
    let z = pts[1]["z"].as_array().unwrap();
    assert!(z
        .iter()
        .flat_map(|row| row.as_array().unwrap())
        .all(|v| v.as_f64() == Some(0.0)));
}

#[test]
fn clustering_path_ends_in_one_cluster() {
    let tmp = tempfile::tempdir().unwrap();
    let (d, r) = (tmp.path().join("d"), tmp.path().join("r"));
    assert!(run(&["gen", "--problem", "cluster", "--out", path_str(&d)])
        .status
        .success());
    let out = run(&[
        "path",
        "--data",
        path_str(&d),
        "--problem",
        "cluster",
        "--out",
        path_str(&r),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(report(&r)["final_cluster_count"], 1);
}

#[test]
fn bench_writes_one_row_per_rep() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&[
        "bench",
        "--problem",
        "lasso",
        "--reps",
        "2",
        "--n",
        "20",
        "--p",
        "30",
        "--out",
        path_str(tmp.path()),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(tmp.path().join("bench.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 2);
}
