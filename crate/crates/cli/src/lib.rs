//! File formats and subcommands for the `multiphase` binary.

pub mod commands;
pub mod error;
pub mod output;
pub mod schema;

pub use commands::{run, Cli};
pub use error::CliError;
