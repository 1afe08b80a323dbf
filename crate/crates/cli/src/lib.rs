//! Command-line front end for `centerlab-core`: CSV ingestion with
//! transforms, the `centerlab` subcommands and static SVG plots.

pub mod commands;
mod error;
pub mod io;
pub mod plot;

pub use commands::run_command;
pub use error::{CliError, Result};
