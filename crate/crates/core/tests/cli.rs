use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn btq(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_btq"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("BTQ_THREADS", t),
        None => cmd.env_remove("BTQ_THREADS"),
    };
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn theta_prints_the_class() {
    let out = btq(&["theta"], None);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["theta_deg2"], serde_json::json!({"hbar^-1": 1, "1": 1}));
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn usage_and_config_errors_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        ("bogus.json", r#"{"command":"bogus"}"#, "bogus"),
        ("levels.json", r#"{"levels":[16,8]}"#, "index-check"),
        ("unknown.json", r#"{"levls":[8]}"#, "theta"),
        ("malformed.json", r#"{"levels":"#, "theta"),
        ("mismatch.json", r#"{"command":"gram"}"#, "theta"),
        ("expr.json", r#"{"functions":{"f":"u ++"}}"#, "toeplitz"),
    ];
    for (name, text, command) in cases {
        let cfg = write_config(tmp.path(), name, text);
        let out = btq(&[command, "--config", &cfg], None);
        assert_eq!(out.status.code(), Some(1), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(btq(&["bogus"], None).status.code(), Some(1));
    assert_eq!(btq(&["theta", "--config", "/nonexistent/cfg.json"], None).status.code(), Some(1));
    assert_eq!(btq(&[], None).status.code(), Some(1));
    let bad_threads = btq(&["theta"], Some("zero"));
    assert_eq!(bad_threads.status.code(), Some(1));
}

#[test]
fn failed_checks_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    // A gap requirement no quantized Bott projector can meet.
    let cfg = write_config(tmp.path(), "gap.json", r#"{"levels":[8],"idempotents":["bott+1"],"tolerances":{"gap":0.49}}"#);
    let out = btq(&["index-check", "--config", &cfg], None);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    // Zero tolerance on a trace that is only integral to roundoff.
    let cfg = write_config(tmp.path(), "tol.json", r#"{"levels":[16],"idempotents":["bott+1"],"tolerances":{"trace":0}}"#);
    let out = btq(&["index-check", "--config", &cfg], None);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], false);
}

#[test]
fn passing_checks_exit_0_and_write_files() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "idx.json", r#"{"levels":[16],"k0":0,"idempotents":["trivial"]}"#);
    let out_dir = tmp.path().join("out");
    let out = btq(&["index-check", "--config", &cfg, "--out", out_dir.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("index-check.json")).unwrap()).unwrap();
    assert_eq!(report["checks"][0]["predicted"], 17);
    let csv = std::fs::read_to_string(out_dir.join("index-check.csv")).unwrap();
    assert!(csv.starts_with("label,N,k0,measured,predicted,residual,pass\n"));

    let cfg = write_config(tmp.path(), "moyal.json", r#"{"seed":7,"trials":20}"#);
    let out = btq(&["moyal-check", "--config", &cfg], None);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["associator"], "max |coeff| = 0");
}

#[test]
fn outputs_are_byte_identical_across_runs_and_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let configs = [
        ("gram", r#"{"levels":[4,9]}"#),
        ("toeplitz", r#"{"levels":[3,5],"functions":{"f":"u*v + w/3"}}"#),
        ("commutator-scan", r#"{"levels":[8,16,32,64],"functions":{"f":"u*v","g":"w"}}"#),
        ("star-defect", r#"{"levels":[8,16,32]}"#),
        ("phi1-probe", r#"{"levels":[8,16,32]}"#),
        ("norm-scan", r#"{"levels":[8,16]}"#),
        ("moyal-check", r#"{"seed":5,"trials":6}"#),
        ("index-check", r#"{"levels":[8,16],"idempotents":["trivial","bott-1"]}"#),
        ("beta-check", r#"{"levels":[8,16,32],"k0":1}"#),
        ("theta", r#"{"k0":3}"#),
    ];
    for (command, text) in configs {
        let cfg = write_config(tmp.path(), &format!("{command}.json"), text);
        let mut runs = Vec::new();
        for (i, threads) in [Some("1"), Some("4"), None].into_iter().enumerate() {
            let dir = tmp.path().join(format!("{command}-{i}"));
            let out = btq(&[command, "--config", &cfg, "--out", dir.to_str().unwrap()], threads);
            assert_eq!(out.status.code(), Some(0), "{command}: {}", String::from_utf8_lossy(&out.stderr));
            runs.push((out.stdout, read_dir_sorted(&dir)));
        }
        assert!(!runs[0].1.is_empty());
        assert!(runs.windows(2).all(|r| r[0] == r[1]), "{command} output differs between runs");
    }
}
