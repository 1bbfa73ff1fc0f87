//! The example reports under docs/reports must be reproduced exactly
//! (timings aside).

use std::path::PathBuf;
use std::process::Command;

use taut_verify::VerificationReport;

pub const GOLDEN: &[(&str, &[&str])] = &[
    ("intersection-numbers", &["--g", "0..1", "--n", "1..4"]),
    ("omega-properties", &["--g", "0..1", "--n", "1..2", "--r-max", "2"]),
    ("omega-polynomiality", &["--g", "0..1", "--n", "1..3"]),
    ("dr-oracles", &["--g", "0..1", "--n", "1..3"]),
    ("upsilon-vanishing", &["--g", "0..1", "--n", "1..2"]),
    ("sigma-zero-formal", &["--g", "0..1", "--n", "1..3"]),
    ("sigma-zero-pairing", &["--g", "0..1", "--n", "1..2"]),
    ("main-theorem", &["--g", "0..1", "--n", "1..2", "--m", "0..2"]),
    ("a-post-conditions", &["--g", "0..1", "--n", "1..2"]),
];

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/reports")
}

fn produce(relation: &str, args: &[&str]) -> String {
    let o = Command::new(env!("CARGO_BIN_EXE_taut-verify"))
        .env_remove("TAUTCALC_CACHE")
        .arg("verify")
        .arg(relation)
        .args(args)
        .output()
        .expect("run binary");
    assert_eq!(o.status.code(), Some(0), "{relation}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).expect("utf-8")
}

fn body(text: &str) -> String {
    let r: VerificationReport = serde_json::from_str(text).expect("report");
    r.body_json().unwrap()
}

#[test]
fn golden_reports_are_reproduced() {
    let regenerate = std::env::var_os("REGENERATE_GOLDEN").is_some();
    for (relation, args) in GOLDEN {
        let got = produce(relation, args);
        let path = golden_dir().join(format!("{relation}.json"));
        if regenerate {
            std::fs::write(&path, &got).unwrap();
            continue;
        }
        let want = std::fs::read_to_string(&path).expect("golden file");
        // the stored body is byte-identical, field order included
        assert_eq!(body(&got), body(&want), "{relation}");
        assert!(want.contains(&body(&want).trim_end().replace('\n', "\n  ")), "{relation}");
    }
}
