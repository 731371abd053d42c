//! End-to-end checks of the binary: exit codes, file emission, determinism,
//! and the external-evaluator subprocess protocol.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_amrpbs"))
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("run.conf");
    fs::write(&path, body).unwrap();
    path
}

#[test]
fn help_exits_zero() {
    let out = bin().arg("--help").output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("usage"));
}

#[test]
fn config_error_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "p_cr = 1.5\n");
    let out = bin().arg("run").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("(0,1)"));
}

#[test]
fn unknown_key_exits_one_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "tau = 2\nwhat = 5\n");
    let out = bin().arg("run").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn unknown_problem_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "problem = rosenbrock\n");
    let out = bin().arg("run").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_flag_exits_one() {
    let out = bin().arg("run").arg("--frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

fn tiny_run_config(out_dir: &Path) -> String {
    format!(
        "problem = riblet-mock\nn_initial = 12\nbudget = 16\nn_pop = 10\nmax_iter = 20\n\
         tau = 3\nseed = 5\nout_dir = {}\n",
        out_dir.display()
    )
}

#[test]
fn run_emits_expected_files() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let cfg = write_config(dir.path(), &tiny_run_config(&out_dir));
    let out = bin().arg("run").arg("--config").arg(&cfg).output().unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    for name in [
        "trace.csv",
        "checks.csv",
        "events.csv",
        "batches.csv",
        "convergence.dat",
        "model_error.dat",
        "summary.json",
        "surrogate.txt",
        "config.used",
    ] {
        assert!(out_dir.join(name).exists(), "missing {name}");
    }
    let trace = fs::read_to_string(out_dir.join("trace.csv")).unwrap();
    assert!(trace.starts_with("iter,gbest,modal_error,refined,n_samples\n"));
    assert!(trace.lines().count() > 1, "trace should have rows");
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    let cfg = write_config(dir.path(), &tiny_run_config(Path::new("ignored")));
    for out in [&out_a, &out_b] {
        let status = bin()
            .arg("run")
            .arg("--config")
            .arg(&cfg)
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    for name in ["trace.csv", "checks.csv", "events.csv", "summary.json"] {
        let a = fs::read(out_a.join(name)).unwrap();
        let b = fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn env_var_overrides_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let env_out = dir.path().join("from_env");
    let cfg = write_config(dir.path(), &tiny_run_config(Path::new("ignored")));
    let status = bin()
        .arg("run")
        .arg("--config")
        .arg(&cfg)
        .env("AMRPBS_OUT", &env_out)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(env_out.join("trace.csv").exists());
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    let cfg = write_config(dir.path(), &tiny_run_config(Path::new("ignored")));
    for (out, seed) in [(&out_a, "5"), (&out_b, "6")] {
        let status = bin()
            .arg("run")
            .arg("--config")
            .arg(&cfg)
            .arg("--seed")
            .arg(seed)
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = fs::read(out_a.join("trace.csv")).unwrap();
    let b = fs::read(out_b.join("trace.csv")).unwrap();
    assert_ne!(a, b, "different seeds should change the trace");
}

#[test]
fn mock_evaluator_speaks_the_line_protocol() {
    let mut child = bin()
        .arg("mock-riblet-evaluator")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut stdin = child.stdin.take().unwrap();
    writeln!(stdin, "0.4 2.0 0.2\n0.3 1.5 0.15").unwrap();
    drop(stdin);
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let lines: Vec<f64> = String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    assert_eq!(lines.len(), 2);
    assert!(lines.iter().all(|v| *v > 0.0), "mock drag must be positive");
}

#[test]
fn mock_evaluator_rejects_malformed_input() {
    let mut child = bin()
        .arg("mock-riblet-evaluator")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut stdin = child.stdin.take().unwrap();
    writeln!(stdin, "0.4 2.0").unwrap();
    drop(stdin);
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

/// The constrained external-evaluator workflow end to end: the optimizer
/// talks to a child process over the line protocol and must return a point
/// satisfying the riblet constraints.
#[test]
fn external_mock_evaluator_run_satisfies_constraints() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let body = format!(
        "problem = external\nexternal_cmd = {} mock-riblet-evaluator\n\
         external_lower = 0.2 0.72 0.12\nexternal_upper = 0.6 3.6 0.46\n\
         external_constraints = riblet\n\
         n_initial = 12\nbudget = 18\nn_pop = 12\nmax_iter = 30\ntau = 3\nseed = 11\n\
         penalty_weight = 10000\nout_dir = {}\n",
        env!("CARGO_BIN_EXE_amrpbs"),
        out_dir.display()
    );
    let cfg = write_config(dir.path(), &body);
    let out = bin().arg("run").arg("--config").arg(&cfg).output().unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary = fs::read_to_string(out_dir.join("summary.json")).unwrap();
    let point = extract_point(&summary);
    assert_eq!(point.len(), 3);
    let (h, s, sig) = (point[0], point[1], point[2]);
    let tol = 1e-3;
    assert!(6.0 * sig - s <= tol, "g1 violated at {point:?}");
    assert!(s - 6.0 * h <= tol, "g2 violated at {point:?}");
    assert!(sig - 0.6 * h <= tol, "g3 violated at {point:?}");
}

fn extract_point(summary: &str) -> Vec<f64> {
    let start = summary.find("\"point\": [").expect("point field") + "\"point\": [".len();
    let end = summary[start..].find(']').expect("closing bracket") + start;
    summary[start..end]
        .split(',')
        .map(|t| t.trim().parse().expect("float"))
        .collect()
}
