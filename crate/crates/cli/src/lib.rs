//! Command-line front end for the `mwave` library.

pub mod cli;
pub mod config;
pub mod error;
pub mod run;

pub use config::{Command, RunConfig};
pub use error::CliError;
pub use run::{run, Report};

/// Exit code when a run completes but a tolerance check fails.
pub const EXIT_TOLERANCE: i32 = 2;
