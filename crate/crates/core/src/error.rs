use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the simulator library.
#[derive(Debug, Error)]
pub enum Error {
    /// One or more configuration invariants do not hold.
    #[error("invalid configuration: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),

    #[error("failed to parse config {path}: {message}")]
    ConfigParse { path: PathBuf, message: String },

    #[error("{0} is outside the domain of the function")]
    Domain(String),

    #[error("packet of device {device} was dropped at cycle {dropped_at}")]
    PacketDropped { device: usize, dropped_at: u64 },

    #[error("instance too large for exhaustive search: {chs} CHs x {nchs} nCHs (limit 6 x 8)")]
    InstanceTooLarge { chs: usize, nchs: usize },

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
