//! Library side of the `tfwd` command: configuration handling and the
//! command dispatcher. The binary only parses flags and writes the report.

pub mod config;
pub mod dispatch;

pub use config::{parse_config, Command, ConfigError, ConfigFile, RunConfig};
pub use dispatch::{dispatch, Dispatched, RunError};
