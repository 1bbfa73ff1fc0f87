use serde::{Deserialize, Serialize};

use crate::cache::CacheStats;
use crate::error::Result;

/// A basis monomial and the nonzero value it pairs to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub generator: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub check: String,
    pub degree: Option<usize>,
    pub witness: Option<Witness>,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseReport {
    pub id: String,
    pub g: usize,
    pub n: usize,
    pub m: usize,
    pub status: Status,
    pub checks: usize,
    pub failures: Vec<Failure>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub cases: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    pub checks: usize,
}

/// The parts of the configuration that determine the result.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub relation: String,
    pub g: String,
    pub n: String,
    pub m: String,
    pub a_grid: String,
    pub max_degree: Option<usize>,
    pub dim_cap: usize,
    pub weight_cap: usize,
    pub r_max: u32,
}

/// Everything that must be reproducible across runs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportBody {
    pub config: ConfigEcho,
    pub pass: bool,
    pub counts: Counts,
    pub cases: Vec<CaseReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub workers: usize,
    pub cache: Option<String>,
    pub cache_stats: CacheStats,
    pub seconds: f64,
    /// per case, in case order
    pub case_seconds: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub body: ReportBody,
    pub run: RunInfo,
}

impl VerificationReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn body_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.body)? + "\n")
    }

    pub fn exit_code(&self) -> i32 {
        if self.body.pass {
            0
        } else {
            1
        }
    }
}

impl ReportBody {
    pub fn new(config: ConfigEcho, cases: Vec<CaseReport>) -> Self {
        let mut counts = Counts {
            cases: cases.len(),
            ..Counts::default()
        };
        for c in &cases {
            counts.checks += c.checks;
            match c.status {
                Status::Pass => counts.passed += 1,
                Status::Fail => counts.failed += 1,
                Status::Error => counts.errors += 1,
            }
        }
        ReportBody {
            config,
            pass: counts.passed == counts.cases,
            counts,
            cases,
        }
    }
}
