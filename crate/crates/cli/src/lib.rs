//! Command-line driver for `exactapprox-core`: configuration, artifact
//! formats and the subcommands.

pub mod artifact;
pub mod commands;
pub mod config;

pub use commands::{run, Outcome, Status};
pub use config::{Options, RunConfig};
