use std::path::Path;
use std::process::{Command, Output};

fn eigenratio(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eigenratio")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const HEADER: &str = "check,model,k,lhs,rhs,slack,status";

#[test]
fn malformed_configs_exit_nonzero_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    for (name, text, needle) in [
        ("typo.toml", "k_maxx = 3\n", "unknown field"),
        ("nested.toml", "[caps]\nverts = 3\n", "unknown field"),
        ("syntax.toml", "k_max = \n", "config error"),
        ("kind.toml", "[[model]]\nkind = \"sphere\"\n", "unknown variant"),
        ("kappa.toml", "kappas = [2.0]\n[[model]]\nkind = \"circle\"\na = 1.0\npoints = 8\n", "kappa"),
    ] {
        let cfg = write(dir.path(), name, text);
        let out = eigenratio(&["verify-all", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{name}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(needle), "{name}: {err}");
    }
    let out = eigenratio(&["verify-all", "--config", "/nonexistent/config.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_all_writes_reports_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "method = \"dense\"\nk_max = 3\n[[model]]\nkind = \"circle\"\na = 2.0\npoints = 32\neigenvalue_rel = 0.05\n",
    );
    let out_dir = dir.path().join("out");
    let out = eigenratio(&["verify-all", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    assert!(csv.starts_with(HEADER));
    assert!(!csv.contains(",FAIL"));
    for name in ["improved_cheeger.json", "ratio_bound.json", "coarea.json", "buser_ledoux.json"] {
        let text = std::fs::read_to_string(out_dir.join(name)).unwrap();
        assert!(serde_json::from_str::<serde_json::Value>(&text).unwrap().is_array(), "{name}");
    }
}

#[test]
fn failing_checks_give_exit_code_one() {
    // a tolerance no discretization can meet
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let cfg = write(dir.path(), "c.toml", "k_max = 2\n[tolerances]\neigenvalue_rel = 1e-12\n");
    let out =
        eigenratio(&["verify-all", "--config", &cfg, "--model", "circle:a=1:N=16", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let csv = std::fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("eigenvalue_convergence") && l.ends_with(",FAIL")));
}

#[test]
fn subcommands_emit_csv_and_json() {
    for cmd in ["spectrum", "cheeger", "improved-cheeger", "multiway", "obsdiam", "ratio-scan"] {
        let out =
            eigenratio(&[cmd, "--model", "torus:n=2:a=0.5:N=4x8", "--k", "3", "--kappa", "0.1", "--method", "dense"]);
        assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.starts_with(HEADER), "{cmd}");
        assert!(text.lines().count() > 1, "{cmd}");
        let out = eigenratio(&[cmd, "--model", "circle:a=1:N=24", "--k", "2", "--format", "json"]);
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert!(!v.as_array().unwrap().is_empty(), "{cmd}");
    }
    let out = eigenratio(&["ratio-scan", "--n", "2", "--a", "0.5", "--k", "9"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 10);
    assert!(text.lines().nth(9).unwrap().starts_with("ratio_bound,torus:n=2:a=0.5,9,16,"));
}

#[test]
fn graph_file_models_and_out_files() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(
        dir.path(),
        "c5.graph",
        "5 5\n0.2\n0.2\n0.2\n0.2\n0.2\n0 1 1 1 1\n1 2 1 1 1\n2 3 1 1 1\n3 4 1 1 1\n0 4 1 1 1\n",
    );
    let out_file = dir.path().join("cheeger.csv");
    let out =
        eigenratio(&["cheeger", "--model", &format!("graph:{graph}"), "--k", "2", "--out", out_file.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&out_file).unwrap();
    assert!(csv.contains("h1_sweep_upper,graph:c5,"));
    let out = eigenratio(&["spectrum", "--k", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = eigenratio(&["spectrum", "--model", "circle:a=1", "--k", "2"]);
    assert_eq!(out.status.code(), Some(2));
}
