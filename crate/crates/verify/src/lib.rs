//! Batch verification of tautological relations with a persistent cache of
//! intersection numbers.

pub mod cache;
pub mod checks;
pub mod config;
pub mod error;
pub mod report;

pub use checks::run_check;
pub use config::{AGrid, CheckConfig, IntRange, Relation};
pub use error::VerifyError;
pub use report::VerificationReport;
