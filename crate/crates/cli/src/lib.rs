//! Batch experiment runner behind the `rrtcut` binary.

pub mod config;
pub mod run;

use thiserror::Error;

pub use config::{parse_args, Command, ExperimentSpec, OutputFormat};
pub use run::{render, run_experiment, Table};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Clap(#[from] clap::Error),
    #[error(transparent)]
    Core(#[from] rrtcut_core::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Clap(_) => 2,
            CliError::Core(_) => 3,
            CliError::Io(_) | CliError::Csv(_) => 4,
        }
    }
}

/// Parses, runs and writes one experiment; returns the rendered output.
pub fn execute(spec: &ExperimentSpec) -> Result<String, CliError> {
    let table = run_experiment(spec)?;
    let text = render(&table, spec)?;
    if let Some(path) = &spec.output_path {
        std::fs::write(path, &text)?;
    }
    Ok(text)
}
