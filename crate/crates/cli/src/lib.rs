//! Verification suites for `holodual-core` and their reports.
//!
//! ```no_run
//! use holodual_cli::{run_suite, RunConfig};
//!
//! let report = run_suite("ball-example", &RunConfig::default()).unwrap();
//! assert!(report.pass);
//! ```

pub mod config;
pub mod report;
pub mod suites;

pub use config::RunConfig;
pub use report::{emit_report, Format, Record, Status, SuiteReport, TableRow};
pub use suites::{run_suite, SUITES};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Core(#[from] holodual_core::Error),
}
