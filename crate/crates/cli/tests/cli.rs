use std::fs;
use std::process::{Command, Output};

fn nave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nave"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn solve_reports_convergence() {
    let o = nave(&["solve", "--problem", "r3:b1", "--theta", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("status: converged"), "{out}");
    assert!(out.contains("method: theta2"));
}

#[test]
fn solve_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.txt");
    let o = nave(&["solve", "--problem", "tridiag:d=10:seed=3", "--trace", trace.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&trace).unwrap();
    let first = text.lines().next().unwrap();
    assert_eq!(first.split(", ").count(), 5);
    assert!(first.starts_with("0, "));
}

#[test]
fn seed_flag_changes_instance() {
    let a = stdout(&nave(&["solve", "--problem", "tridiag:d=10", "--seed", "1"]));
    let b = stdout(&nave(&["solve", "--problem", "tridiag:d=10", "--seed", "2"]));
    assert!(a.contains("seed=1") && b.contains("seed=2"));
}

#[test]
fn baselines_share_the_surface() {
    for m in ["softmax", "ip"] {
        let o = nave(&["solve", "--problem", "r3:b1", "--method", m]);
        assert_eq!(o.status.code(), Some(0), "{m}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(nave(&["solve", "--problem", "nope:d=1"]).status.code(), Some(2));
    assert_eq!(nave(&["solve", "--problem", "r3:b1", "--tol", "-1"]).status.code(), Some(2));
    assert_eq!(nave(&["solve", "--problem", "tridiag:d=50", "--max-iter", "1"]).status.code(), Some(3));
    assert_eq!(nave(&["ode", "bvp", "--rates", "--h-list", "0.1,0.05"]).status.code(), Some(2));
}

#[test]
fn check_p0_prints_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.txt");
    fs::write(&m, "dims: 2 2\n0 1\n1 0\n").unwrap();
    let out = stdout(&nave(&["check", "p0", "--matrix", m.to_str().unwrap()]));
    assert!(out.contains("verdict: ExactNotP0"));
    assert!(out.contains("index set [0, 1]"));
    fs::write(&m, "dims: 2 3\n1 2 3\n4 5 6\n").unwrap();
    assert_eq!(nave(&["check", "p0", "--matrix", m.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn check_loja_verdicts() {
    let out = stdout(&nave(&["check", "loja", "--family", "theta2", "--grid-max", "1e4"]));
    assert!(out.starts_with("x,ratio\n"));
    assert!(out.lines().last().unwrap().starts_with("verdict: SatisfiedI"));
    let out = stdout(&nave(&["check", "loja", "--family", "logexp-counterexample", "--grid-max", "1e12"]));
    assert!(out.lines().last().unwrap().starts_with("verdict: FailsBoth"));
}

#[test]
fn table_methods_from_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.txt");
    fs::write(&spec, "problem = r3:b1\nmethods = theta1, theta2\n\nproblem = r4:bstar1\nmethods = softmax\n").unwrap();
    let out_dir = dir.path().join("out");
    let o = nave(&[
        "table",
        "methods",
        "--spec",
        spec.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(out_dir.join("methods.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "label,method,error,iterations,time_ms,status");
    assert_eq!(lines.len(), 4);
    assert!(lines[3].starts_with("r4:bstar1,softmax,"));
}

#[test]
fn invalid_spec_emits_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.txt");
    fs::write(&spec, "problem = r3:b1\n\nproblem = r3:b1\nmethods = newton\n").unwrap();
    let out_dir = dir.path().join("out");
    let o = nave(&["table", "methods", "--spec", spec.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out_dir.join("methods.csv").exists());
}

#[test]
fn table_ridge_markdown() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.txt");
    fs::write(&grid, "lam = 0\nmu = 100\nm = 3\nd = 10\n").unwrap();
    let out = stdout(&nave(&["table", "ridge", "--grid", grid.to_str().unwrap()]));
    assert!(out.contains("(0, 100) (3, 10)"));
    assert!(out.contains("Time (×1e-2 s)"));
}

#[test]
fn ode_rates_write_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bvp.dat");
    let o = nave(&["ode", "bvp", "--rates", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("slope: 1.0"));
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("h,error\n"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn sparse_path_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("path.dat");
    let o = nave(&["path", "--lambdas", "0.05,0.1", "--m", "8", "--d", "5", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("lambda,coef_1,coef_2,coef_3,coef_4,coef_5\n"));
}
