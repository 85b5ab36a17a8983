//! Scenario front end for the `qoct` binary: config parsing, presets, the
//! scenario runner and CSV/manifest output.

pub mod config;
pub mod error;
pub mod output;
pub mod preset;
pub mod scenario;
pub mod selftest;

pub use config::ScenarioConfig;
pub use error::CliError;
pub use scenario::{run, Manifest, RunResult, Scenario, Traces};
