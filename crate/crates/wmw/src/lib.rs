//! Command-line front end for `wmw-core`: CSV and TOML input, CSV and
//! markdown output, and a rayon runner whose results do not depend on the
//! number of worker threads.

pub mod cli;
pub mod config;
pub mod error;
pub mod input;
pub mod report;
pub mod runner;
pub mod tables;

pub use error::CliError;
