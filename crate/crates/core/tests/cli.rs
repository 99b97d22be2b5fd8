use std::path::Path;
use std::process::{Command, Output};

fn gdpq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gdpq")).args(args).env_remove("GDPQ_SEED").output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_reformulate_verify() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.json");
    let out = gdpq(&["generate", "random", "--seed", "4", "-o", path(&model)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let lp = dir.path().join("m.lp");
    let out = gdpq(&["reformulate", path(&model), "--method", "hull-exact", "--s3", "--format", "lp", "-o", path(&lp)]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(report["method"], "hull-exact");
    assert!(std::fs::read_to_string(&lp).unwrap().starts_with("\\ model:"));

    let out = gdpq(&["verify", "binary-fix", "--model", path(&model), "--samples", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["check"], "binary-fix");
    assert_eq!(summary["bodies"], 5);
    assert_eq!(summary["failing"], 0);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = gdpq(&["generate", "kmeans", "--seed", "2"]);
    let b = gdpq(&["generate", "kmeans", "--seed", "2"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.json");
    assert!(gdpq(&["generate", "cstr", "--nt", "1", "-o", path(&model)]).status.success());
    assert_eq!(gdpq(&["reformulate", path(&model), "--method", "hull-eps", "--eps", "0"]).status.code(), Some(2));
    assert_eq!(gdpq(&["reformulate", "/nonexistent/m.json", "--method", "bigm"]).status.code(), Some(3));
    assert_eq!(gdpq(&["frobnicate"]).status.code(), Some(2));
    let out = gdpq(&["solve-external", path(&model), "--cmd", "exit 0", "--time-limit", "5"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("suite.json");
    std::fs::write(
        &manifest,
        r#"{"instances": [{"id": "r", "generator": {"family": "random", "n_dims": 2, "n_disjunctions": 2,
            "disjuncts_per": 2, "constraints_per": 1, "convex": true}, "seeds": [1, 2]}],
            "methods": [{"method": "bigm"}, {"method": "hull-exact"}], "checks": ["counts"]}"#,
    )
    .unwrap();
    let csv = dir.path().join("out.csv");
    let out = gdpq(&["bench", path(&manifest), "-o", path(&csv)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.starts_with("instance,method,eps,"));
}
