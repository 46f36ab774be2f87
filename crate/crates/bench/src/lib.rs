//! Benchmark harness for almkit: suite files, a parallel runner, exact
//! oracles, CSV/JSON emission and performance profiles.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod emit;
pub mod oracles;
pub mod profile;
pub mod runner;
pub mod suite;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("suite: {0}")]
    Suite(String),
    #[error("oracle capability: {0}")]
    Capability(String),
    #[error(transparent)]
    Solver(#[from] almkit::AlmError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;
