use std::path::PathBuf;

use thiserror::Error;

use crate::Vec3;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index {index} out of range for path of {len} nodes")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("start position is in collision")]
    StartInCollision,

    #[error("goal position is in collision")]
    GoalInCollision,

    #[error("goal unreachable within {iterations} iterations")]
    Unreachable { iterations: usize },

    #[error("no recovery path available: {0}")]
    NoRecovery(String),

    /// Refinement could not produce a collision-free path and the input was
    /// not collision-free either. Carries the best effort result.
    #[error("recovery path refinement failed to clear all collisions")]
    RefinementFailed { best_effort: Vec<Vec3> },

    #[error("scenario error: {0}")]
    Scenario(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
