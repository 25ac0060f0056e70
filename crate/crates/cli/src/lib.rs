//! Batch experiment driver: configuration, run persistence, and the packaged
//! experiments (dispersion, inflate, simulate, sweep, audit).

pub mod commands;
pub mod config;
pub mod csvio;
pub mod fld;
pub mod manifest;

mod error;

pub use error::{CliError, ExitCode};

pub type Result<T> = std::result::Result<T, CliError>;
