//! Configuration files, output formats and parameter sweeps for the
//! `welcher` command-line runner. The physics lives in `welcher-core`.

pub mod config;
pub mod io;
pub mod sweep;

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Config {
        path: PathBuf,
        source: toml::de::Error,
    },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
    #[error(transparent)]
    Simulation(#[from] welcher_core::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
