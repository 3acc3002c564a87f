//! Command-line front end: config model, grid syntax, deterministic
//! serialization, and the subcommand runners.

pub mod config;
pub mod grid;
pub mod output;
pub mod run;
