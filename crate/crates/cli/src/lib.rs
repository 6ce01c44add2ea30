//! Experiment runner behind the `atomqec` binary: config parsing, run orchestration and
//! CSV/SVG report generation.

pub mod config;
pub mod runner;
pub mod schema;
pub mod svg;
pub mod verify;

pub use config::{parse_config, parse_config_with, Config, ConfigError};
pub use runner::{simulate, sweep_scaling, write_run, write_scaling, CliError, RunResult};
