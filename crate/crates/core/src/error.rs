use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("sheep index {index} out of range for swarm of {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("coincident agents: distance {distance:e} between {what}")]
    Singularity { what: String, distance: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("shepherd repulsion gain K_s3 must be positive")]
    ZeroShepherdGain,

    #[error("pinning and target sheep coincide; feasible line undefined")]
    DegenerateLine,

    #[error("feasible coefficient sets are empty")]
    EmptyFeasibleSet,

    #[error("sheep {0} has no extended neighbours")]
    EmptyExtendedNeighborhood(usize),

    #[error("sheep {0} has no sensing neighbours; shepherd cannot act on it")]
    NoSensingNeighbors(usize),

    #[error("target sheep {0} is already separated")]
    AlreadySeparated(usize),

    #[error("no path from start to goal")]
    Unreachable,

    #[error("step budget must be positive")]
    InvalidBudget,

    #[error("interaction graph has no nodes")]
    EmptyGraph,

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
