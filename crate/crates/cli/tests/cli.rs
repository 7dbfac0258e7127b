use std::path::Path;
use std::process::{Command, Output};

use cmono_cli::{EXIT_ERROR, EXIT_FAIL, EXIT_OK, EXIT_UNDECIDED};

fn cmono(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cmono")).args(args).output().expect("spawn cmono")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn certified_expression_exits_ok() {
    let o = cmono(&["certify", "exp(-sqrt(x)) on (0,inf)", "--no-timestamp", "--format", "text"]);
    assert_eq!(code(&o), EXIT_OK);
    let out = stdout(&o);
    assert!(out.starts_with("CM on (0, inf): exp(-x^(1/2))"), "{out}");
    assert!(out.contains("Corollary 6"));
}

#[test]
fn no_rule_is_undecided() {
    let o = cmono(&["certify", "log((x+1)/(x+2))", "--interval", "(0,inf)"]);
    assert_eq!(code(&o), EXIT_UNDECIDED);
}

#[test]
fn parse_errors_exit_with_a_caret() {
    let o = cmono(&["certify", "exp("]);
    assert_eq!(code(&o), EXIT_ERROR);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("column 5") && err.contains('^'), "{err}");
}

#[test]
fn confirmed_failure_exits_two() {
    let o = cmono(&["test", "loggamma(x+1) - loggamma(x+2)", "--interval", "(1,50)", "--order", "2", "--format", "text"]);
    assert_eq!(code(&o), EXIT_FAIL);
    assert!(stdout(&o).contains("re-confirmed"));
}

#[test]
fn sign_test_json_report() {
    let o = cmono(&["test", "exp(-x)", "--interval", "(0,10)", "--order", "6", "--no-timestamp"]);
    assert_eq!(code(&o), EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], "sign-report/1");
    assert!(v.get("generated").is_none());
}

#[test]
fn reports_are_deterministic_without_timestamp() {
    let args = ["classify", "psi-gap a=0 b=0.5 alpha=1 beta=0.5", "--no-timestamp"];
    let (a, b) = (cmono(&args), cmono(&args));
    assert_eq!(code(&a), EXIT_OK);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["citation"], "Theorem 17 (iii_1)");
}

#[test]
fn classify_not_exits_two() {
    let o = cmono(&["classify", "linfraclog a=1 b=1 c=2 d=1", "--format", "text"]);
    assert_eq!(code(&o), EXIT_FAIL);
}

#[test]
fn json_family_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.json");
    std::fs::write(&path, r#"{"family": "psigap", "params": {"a": 0, "b": "1/2", "alpha": 1, "beta": 0.5}}"#).unwrap();
    let o = cmono(&["classify", "--json", path.to_str().unwrap(), "--no-timestamp"]);
    assert_eq!(code(&o), EXIT_OK, "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::write(&path, r#"{"family": "psigap", "params": {"a": "x"}}"#).unwrap();
    assert_eq!(code(&cmono(&["classify", "--json", path.to_str().unwrap()])), EXIT_ERROR);
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.cfg");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn config_file_is_merged_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "# defaults\norder = 3\nformat = text\nno-timestamp = yes\n");
    let o = cmono(&["test", "exp(-x)", "--interval", "(0,10)", "--config", &cfg]);
    assert!(stdout(&o).contains("N=3"), "{}", stdout(&o));
    let o = cmono(&["test", "exp(-x)", "--interval", "(0,10)", "--config", &cfg, "--order", "5"]);
    assert!(stdout(&o).contains("N=5"), "{}", stdout(&o));
    let bad = write_config(dir.path(), "order = three\n");
    let o = cmono(&["test", "exp(-x)", "--config", &bad]);
    assert_eq!(code(&o), EXIT_ERROR);
    assert!(String::from_utf8(o.stderr).unwrap().contains("line 1"));
}

#[test]
fn out_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.txt");
    let o = cmono(&["certify", "exp(-x)", "--format", "text", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), EXIT_OK);
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().starts_with("CM"));
}

#[test]
fn default_sweep_has_nine_rows() {
    let o = cmono(&["alpha0", "sweep", "--format", "csv", "--no-timestamp"]);
    assert_eq!(code(&o), EXIT_OK);
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), cmono_core::alpha0::CSV_HEADER);
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 9);
    for row in rows {
        let cols: Vec<&str> = row.split(',').collect();
        let (lo, hi): (f64, f64) = (cols[3].parse().unwrap(), cols[4].parse().unwrap());
        assert!(1.0 - 1e-3 <= lo && lo <= hi && hi <= 2.0 + 1e-3, "{row}");
    }
}

#[test]
fn asymcheck_defaults_pass() {
    let o = cmono(&["asymcheck", "--no-timestamp"]);
    assert_eq!(code(&o), EXIT_OK, "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], "asymcheck/1");
}
