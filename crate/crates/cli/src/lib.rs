//! Configuration, campaigns and report emission for the `cocycle` binary.

pub mod commands;
pub mod config;
pub mod report;

pub use commands::{exit_code, run_command, Command, Outcome, RunError};
pub use config::{parse_config, CampaignConfig, ConfigError, Format};
pub use report::{emit_report, Cell, Table};
