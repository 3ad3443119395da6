//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

use crate::gridworld::GridConfig;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid must be at least 2x2, got {width}x{height}")]
    InvalidGrid { width: usize, height: usize },

    /// A terminal (hunter on prey) state was stepped or queried for a
    /// decision. Capture states are absorbing and never presented to an
    /// agent, so this always signals caller misuse.
    #[error("cannot act in a terminal state: hunter and prey coincide")]
    TerminalState,

    #[error("reward must be finite, got {0}")]
    NonFiniteReward(f64),

    #[error("invalid learning parameters: {0}")]
    InvalidParams(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("state lies outside the teacher's {grid} grid")]
    StateOutsideGrid { grid: GridConfig },

    #[error("teacher was trained on a {teacher} grid, environment is {env}")]
    GridMismatch { teacher: GridConfig, env: GridConfig },

    #[error("schedule '{0}' needs a teacher and none was provided")]
    MissingTeacher(&'static str),

    #[error("training needs at least one episode")]
    NoEpisodes,

    #[error("invalid experiment config: {0}")]
    InvalidConfig(String),

    /// A value sweep failed to settle within its budget. With exact
    /// dynamics and a proper policy this cannot happen, so it indicates
    /// either an improper policy or broken transition dynamics.
    #[error("value sweep did not converge within {0} sweeps")]
    NoConvergence(usize),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}:{line}: {message}", path.display())]
    MalformedTable {
        path: PathBuf,
        line: usize,
        message: String,
    },
}
