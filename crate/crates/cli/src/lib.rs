//! Configuration loading, command implementations and report writers for
//! the `symreach` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod network;
pub mod report;

pub use commands::{cmd_bound_nn, cmd_partition, cmd_verify, parse_box, Outcome};
pub use config::{LoadedConfig, ProblemConfig};
pub use error::{CliError, Result};
pub use network::{load_network, network_to_json, parse_network};
pub use report::{Report, SplitsFile, StepHull, Verdict};
