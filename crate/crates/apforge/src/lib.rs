//! Command line surface of `apforge`: argument parsing, the JSON and CSV
//! formats, and the subcommands built on `apforge-core`.

pub mod args;
pub mod commands;
pub mod error;
pub mod report;

pub use commands::run;
pub use error::CliError;
