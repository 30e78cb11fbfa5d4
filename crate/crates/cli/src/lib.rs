//! Verification campaigns for the cavity toolkit, as used by the `cavity`
//! binary.

pub mod commands;
pub mod config;
pub mod report;

pub use commands::{CliError, Command};
pub use config::{ConfigError, Format, ScenarioConfig};
pub use report::{Check, Report, Section};
