//! Command-line front end: configuration, the six subcommands and their
//! table, JSONL and manifest outputs.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{cmd_baseline, cmd_generate, cmd_plan, cmd_report, cmd_search, cmd_setups, PlanTarget};
pub use config::RunConfig;
