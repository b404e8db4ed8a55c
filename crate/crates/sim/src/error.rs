use std::path::PathBuf;

use eqtrack::control::ControllerKind;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Core(#[from] eqtrack::Error),
    #[error("run {run} (seed {seed}, controller {kind}) diverged: {reason}")]
    Diverged {
        run: usize,
        seed: u64,
        kind: ControllerKind,
        reason: String,
    },
    #[error("{path}:{line}: {message}")]
    Config { path: String, line: usize, message: String },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl SimError {
    pub fn diverged(run: usize, seed: u64, kind: ControllerKind, reason: impl Into<String>) -> Self {
        Self::Diverged { run, seed, kind, reason: reason.into() }
    }
}

pub type Result<T> = std::result::Result<T, SimError>;
