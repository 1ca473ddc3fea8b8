//! Experiment runner behind the `rainbow` binary.
//!
//! An [`ExperimentConfig`] names a task and its input; [`run_experiment`]
//! turns it into a CSV table (or hypergraph text for `generate`) and a
//! verdict. Exit codes: 0 success, 1 bad input, 2 a verification failed.

pub mod config;
mod run;
pub mod source;
pub mod table;

use std::fmt;

pub use config::{ExperimentConfig, Task};
pub use run::{run_experiment, Output, Report};

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Input(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        1
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<rainbow_core::error::Error> for CliError {
    fn from(e: rainbow_core::error::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

/// Exit code for a verification that ran and failed.
pub const EXIT_VERIFICATION_FAILED: u8 = 2;
