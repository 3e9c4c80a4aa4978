//! Library side of the `regdim` command: configuration, the three
//! commands, and CSV output.

pub mod config;
pub mod estimate;
pub mod formula;
pub mod output;
pub mod sweep;

use thiserror::Error;

pub use config::{Plan, RunConfig};
pub use output::Table;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },
    #[error("computation failed: {0}")]
    Compute(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Compute(_) | CliError::Io(_) => 3,
        }
    }
}

impl From<regdim::Error> for CliError {
    fn from(e: regdim::Error) -> Self {
        CliError::Compute(e.to_string())
    }
}
