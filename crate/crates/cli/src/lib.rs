//! `sunlab` command line and local service.
//!
//! The binary is a thin wrapper: every subcommand is a function here so the
//! integration tests can drive it without spawning processes.

pub mod cli;
pub mod commands;
pub mod error;
pub mod plot;
pub mod server;

pub use error::CliError;
