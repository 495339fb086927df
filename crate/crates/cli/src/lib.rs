//! Configuration, pipeline dispatch and CSV reporting for the `weylsys` tool.

pub mod config;
pub mod output;
pub mod run;

pub use config::{ConfigError, Pipeline, RunConfig};
pub use run::{exit_code, run, Check, Mode, RunError, RunReport};
