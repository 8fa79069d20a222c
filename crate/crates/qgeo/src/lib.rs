//! Command-line front end for `qgeo-core`.
//!
//! Adds a thread-pool executor, configuration files and JSON/CSV artifacts
//! on top of the `no_std` core.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod exec;
pub mod output;
pub mod povm_spec;

pub use error::CliError;
pub use exec::Pool;
