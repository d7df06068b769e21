//! Std companion to `fwdbayes-core`: TOML configs, JSON and CSV reports,
//! rayon-parallel replication drivers and the `fwdbayes` command line.

pub mod cli;
pub mod config;
pub mod driver;
pub mod error;
pub mod report;
pub mod tables;

pub use error::{CliError, Result};
