//! One line per acceptance criterion. Criteria that cannot hold print FAIL
//! with the measured evidence; the test itself fails only when an outcome
//! differs from the recorded expectation. Each sweep runs in its own
//! `taut-verify` process, so memos do not pile up across criteria.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use num_traits::Zero;
use serde_json::Value;

use taut_core::arith::{frac, rational_to_string, Rational};
use taut_core::eval::{integrate, psi_integral, PsiKey};
use taut_core::omega::{omega_general_fields, OmegaSpec};
use taut_verify::checks::compact_type_degrees;
use taut_verify::Relation;

/// Criteria whose literal statement is false; see the printed evidence.
const EXPECTED_FAIL: &[u32] = &[3];

struct Line {
    criterion: u32,
    pass: bool,
    detail: String,
}

fn run(relation: Relation) -> (Value, f64) {
    let dir = tempfile::tempdir().expect("tempdir");
    let report = dir.path().join("report.json");
    let t = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_taut-verify"))
        .args(["verify", relation.id(), "--report"])
        .arg(&report)
        .output()
        .expect("run binary");
    let secs = t.elapsed().as_secs_f64();
    assert!(
        matches!(out.status.code(), Some(0 | 1)),
        "{relation}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = serde_json::from_str(&std::fs::read_to_string(&report).expect("report")).expect("json");
    (v, secs)
}

fn passed(r: &Value) -> bool {
    r["body"]["pass"] == Value::Bool(true)
}

fn cases(r: &Value) -> &[Value] {
    r["body"]["cases"].as_array().map_or(&[], |v| v.as_slice())
}

fn summary(r: &Value, secs: f64) -> String {
    let c = &r["body"]["counts"];
    let mut s = format!(
        "{}: {}/{} cases, {} checks, {:.1}s",
        r["body"]["config"]["relation"].as_str().unwrap_or("?"),
        c["passed"],
        c["cases"],
        c["checks"],
        secs
    );
    for case in cases(r).iter().filter(|c| c["status"] != "pass").take(3) {
        let f = &case["failures"][0];
        s += &format!("; first failure {} {} {}", case["id"], f["check"], f["detail"]);
    }
    s
}

fn criterion_1() -> Line {
    let (r, secs) = run(Relation::IntersectionNumbers);
    let base = psi_integral(&PsiKey::new(0, vec![0, 0, 0])) == Rational::from_integer(1.into())
        && psi_integral(&PsiKey::new(1, vec![1])) == frac(1, 24);
    Line {
        criterion: 1,
        pass: passed(&r) && base && secs < 1.0,
        detail: summary(&r, secs),
    }
}

fn criterion_2() -> Line {
    let (r, secs) = run(Relation::OmegaProperties);
    let mumford = cases(&r)
        .iter()
        .any(|c| c["id"] == "g=1 n=1 m=0 r=1 s=1" && c["checks"].as_u64() >= Some(2) && c["status"] == "pass");
    Line {
        criterion: 2,
        pass: passed(&r) && mumford && secs < 600.0,
        detail: summary(&r, secs),
    }
}

fn criterion_3() -> Line {
    let (r, secs) = run(Relation::OmegaPolynomiality);
    let mut detail = summary(&r, secs) + " (bound 2k, fields >= 0)";
    // the literal bound k, measured through lambda_g pairings
    let mut literal = true;
    for (g, u, top) in [(0u32, vec![1u64, 2, 3], 2usize), (1, vec![1, 2], 2), (2, vec![1], 3)] {
        let prof = compact_type_degrees(g, &u, top, true).expect("compact-type sweep");
        let degs: Vec<String> = prof
            .iter()
            .map(|p| format!("{}->{}", p.k, p.pairing.map_or("0".into(), |d| d.to_string())))
            .collect();
        literal &= prof.iter().all(|p| p.pairing.map_or(true, |d| d <= p.k));
        detail += &format!("; pairing degrees g={g} u={u:?}: {}", degs.join(" "));
    }
    // degree bound with a negative field
    let om = omega_general_fields(0, &OmegaSpec::new(2, 0, vec![3, -1, 0, 0], Rational::from_integer(1.into())), 1)
        .expect("omega");
    let v = integrate(&om.component(1));
    let bound_holds = v.is_zero();
    detail += &format!("; (0,4) a=2 b=(3,-1,0,0) degree-1 integral {}", rational_to_string(&v));
    Line {
        criterion: 3,
        pass: passed(&r) && literal && bound_holds,
        detail,
    }
}

fn simple(criterion: u32, relation: Relation, limit: f64) -> Line {
    let (r, secs) = run(relation);
    Line {
        criterion,
        pass: passed(&r) && r["body"]["counts"]["cases"].as_u64() > Some(0) && secs < limit,
        detail: summary(&r, secs),
    }
}

fn criterion_6() -> Line {
    let (a, sa) = run(Relation::SigmaZeroFormal);
    let (b, sb) = run(Relation::SigmaZeroPairing);
    Line {
        criterion: 6,
        pass: passed(&a) && passed(&b),
        detail: format!("{}; {}", summary(&a, sa), summary(&b, sb)),
    }
}

fn criterion_7() -> Line {
    let (r, secs) = run(Relation::MainTheorem);
    let pushed = cases(&r).iter().any(|c| c["m"] == 0) && cases(&r).iter().any(|c| c["m"] == 1);
    Line {
        criterion: 7,
        pass: passed(&r) && pushed,
        detail: summary(&r, secs),
    }
}

fn cli(args: &[&str], cache: &Path, report: &Path) -> Value {
    let out = Command::new(env!("CARGO_BIN_EXE_taut-verify"))
        .args(args)
        .arg("--cache")
        .arg(cache)
        .arg("--report")
        .arg(report)
        .output()
        .expect("run binary");
    assert!(out.status.code().is_some());
    serde_json::from_str(&std::fs::read_to_string(report).expect("report")).expect("json")
}

fn criterion_9() -> Line {
    let dir = tempfile::tempdir().expect("tempdir");
    let mut pass = true;
    let mut detail = Vec::new();
    for args in [
        vec!["verify", "upsilon-vanishing", "--g", "0..1", "--n", "1..2"],
        vec!["verify", "main-theorem", "--g", "0..1", "--n", "1..2", "--m", "0..1"],
        vec!["verify", "omega-properties", "--g", "0..1", "--n", "1..2", "--r-max", "3"],
    ] {
        let cache = dir.path().join(format!("{}.cache", args[1]));
        let runs: Vec<Value> = ["1", "2", "3"]
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let mut a = args.clone();
                a.extend(["--workers", w]);
                let rep = dir.path().join(format!("{}-{i}.json", args[1]));
                cli(&a, &cache, &rep)
            })
            .collect();
        let bodies: Vec<String> = runs.iter().map(|v| v["body"].to_string()).collect();
        let same = bodies.iter().all(|b| b == &bodies[0]);
        let cold = &runs[0]["run"]["cache_stats"];
        let warm = &runs[1]["run"]["cache_stats"];
        let cache_used = cold["written"].as_u64() > Some(0)
            && warm["loaded"] == cold["written"]
            && warm["written"].as_u64() == Some(0);
        pass &= same && cache_used && runs[0]["body"]["pass"] == Value::Bool(true);
        detail.push(format!(
            "{}: bodies identical over workers 1/2/3 and cold/warm cache: {same}, cache {} written then {} loaded",
            args[1], cold["written"], warm["loaded"]
        ));
    }
    Line {
        criterion: 9,
        pass,
        detail: detail.join("; "),
    }
}

#[test]
fn acceptance() {
    let lines: Vec<Line> = vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        simple(4, Relation::DrOracles, 300.0),
        simple(5, Relation::UpsilonVanishing, 1800.0),
        criterion_6(),
        criterion_7(),
        simple(8, Relation::APostConditions, f64::INFINITY),
        criterion_9(),
    ];
    for l in &lines {
        println!(
            "criterion {}: {} ({})",
            l.criterion,
            if l.pass { "PASS" } else { "FAIL" },
            l.detail
        );
    }
    let unexpected: Vec<u32> = lines
        .iter()
        .filter(|l| l.pass == EXPECTED_FAIL.contains(&l.criterion))
        .map(|l| l.criterion)
        .collect();
    assert!(unexpected.is_empty(), "criteria with unexpected outcome: {unexpected:?}");
}
