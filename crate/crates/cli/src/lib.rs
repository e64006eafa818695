//! Command-line front end for `heatrobin-core`: JSON problem files in, a CSV
//! solution grid and a JSON report out.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use error::CliError;
