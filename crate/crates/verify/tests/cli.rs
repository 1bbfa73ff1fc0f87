use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_taut-verify"));
    c.env_remove("TAUTCALC_CACHE");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("run binary")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn gc(path: &Path) -> (i32, Value) {
    let o = run(&["cache", "gc", path.to_str().unwrap()]);
    (o.status.code().unwrap(), serde_json::from_slice(&o.stdout).expect("gc json"))
}

#[test]
fn lists_relations() {
    let o = run(&["--list-relations"]);
    assert!(o.status.success());
    let s = String::from_utf8(o.stdout).unwrap();
    for id in ["upsilon-vanishing", "sigma-zero-formal", "sigma-zero-pairing", "main-theorem", "omega-properties"] {
        assert!(s.lines().any(|l| l.starts_with(id)), "{id}");
    }
}

#[test]
fn passing_run_exits_zero() {
    let o = run(&["verify", "upsilon-vanishing", "--g", "0", "--n", "2", "--m", "1", "--a-grid", "box:3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["body"]["pass"], Value::Bool(true));
    assert_eq!(r["body"]["counts"]["cases"], 6);
}

#[test]
fn dimension_cap_is_a_configuration_error() {
    let o = run(&["verify", "upsilon-vanishing", "--dim-cap", "9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("dimension cap exceeded"));
    let o = run(&["verify", "upsilon-vanishing", "--g", "x"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn newer_cache_version_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c");
    std::fs::write(&p, "TAUTCACHE v2\n").unwrap();
    let o = run(&["verify", "intersection-numbers", "--g", "0", "--n", "3", "--cache", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cache version mismatch"));
}

#[test]
fn cache_after_a_genus_one_run() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c");
    let ps = p.to_str().unwrap();
    std::fs::write(&p, "TAUTCACHE v1\n").unwrap();
    let (code, r) = gc(&p);
    assert_eq!(code, 0);
    assert_eq!(r["total"], 0);
    assert_eq!(r["pass"], Value::Bool(true));

    let o = run(&["verify", "intersection-numbers", "--g", "1", "--n", "1", "--cache", ps]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = taut_verify::cache::lookup_psi(&p, 1, &[1]).unwrap();
    assert_eq!(v, Some(taut_core::arith::frac(1, 24)));
    let (code, r) = gc(&p);
    assert_eq!(code, 0);
    assert!(r["entries"]["psi_integral"].as_u64().unwrap() >= 1);

    // the env variable stands in for --cache
    let o = bin()
        .args(["verify", "intersection-numbers", "--g", "1", "--n", "1"])
        .env("TAUTCALC_CACHE", ps)
        .output()
        .unwrap();
    let rep: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(rep["run"]["cache_stats"]["loaded"].as_u64().unwrap() >= 1);
    assert_eq!(rep["run"]["cache_stats"]["written"], 0);
}

#[test]
fn tampered_entry_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c");
    let ps = p.to_str().unwrap();
    let o = run(&["verify", "intersection-numbers", "--g", "1", "--n", "1..2", "--cache", ps]);
    assert_eq!(o.status.code(), Some(0));
    let mut bytes = std::fs::read(&p).unwrap();
    let at = bytes.windows(7).position(|w| w == b"(1,(1))").expect("entry present");
    bytes[at + 8] ^= 1;
    std::fs::File::create(&p).unwrap().write_all(&bytes).unwrap();
    let (code, r) = gc(&p);
    assert_eq!(code, 1);
    let bad = r["corrupt"].as_array().unwrap();
    assert_eq!(bad.len(), 1);
    assert_eq!(bad[0]["reason"], "checksum mismatch");
    assert!(bad[0]["payload"].as_str().unwrap().contains("psi_integral"));
    // compaction drops it, and the file is clean afterwards
    let o = run(&["cache", "gc", ps, "--compact"]);
    assert_eq!(o.status.code(), Some(1));
    let (code, r) = gc(&p);
    assert_eq!(code, 0);
    assert!(r["total"].as_u64().unwrap() >= 1);
}
