//! Verification suites, config handling and report assembly for the
//! capcone command-line tool.

pub mod config;
pub mod report;
pub mod suites;

pub use config::{Command, ConfigError, Overrides, RunConfig};
pub use report::{CheckRecord, Report, Status};
