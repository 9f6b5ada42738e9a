//! Command-line front end: definition files and subcommands.

pub mod app;
pub mod behaviors;
pub mod defs;

pub use app::{run, Cli, EXIT_LAW_FAILURE, EXIT_PASS, EXIT_USAGE};
pub use defs::{parse_definition, DefError, DefErrorKind};
