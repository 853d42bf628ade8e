//! Scenario runs, parameter sweeps and their file outputs.

use std::fmt::Display;
use std::path::Path;

pub mod output;
pub mod plot;
pub mod scenario;
pub mod spec;
pub mod sweep;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error("plot: {0}")]
    Plot(String),
    #[error("{0}")]
    Other(String),
}

impl ExperimentError {
    pub fn io(path: &Path, e: impl Display) -> Self {
        Self::Io {
            path: path.display().to_string(),
            msg: e.to_string(),
        }
    }
}

pub fn read_text(path: &Path) -> Result<String, ExperimentError> {
    std::fs::read_to_string(path).map_err(|e| ExperimentError::io(path, e))
}
