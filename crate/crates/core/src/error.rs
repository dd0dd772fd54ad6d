use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("self-loop on node `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge `{0}` -> `{1}`")]
    DuplicateEdge(String, String),
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("graph is not strongly connected")]
    NotStronglyConnected,
    #[error("node index {0} has no outgoing edge")]
    SinkNode(usize),
    #[error("stationary iteration did not converge (residual {0:e})")]
    ConvergenceFailure(f64),
    #[error("probability vector is not normalized (sum {0})")]
    NotNormalized(f64),
    #[error("probability vector has a negative or non-finite entry at {0}")]
    InvalidProbability(usize),
    #[error("agent count must be positive")]
    ZeroAgents,
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("count matrix has no nonzero entry")]
    AllZero,
    #[error("{} invalid trajectories", .0.len())]
    InvalidTrajectories(Vec<TrajectoryError>),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// A single problem found while validating a trajectory file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TrajectoryError {
    Malformed { line: usize, message: String },
    UnknownNode { id: u64, label: String },
    NonEdgeStep { id: u64, from: String, to: String },
    DuplicateId(u64),
    TooShort(u64),
}

impl fmt::Display for TrajectoryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrajectoryError::Malformed { line, message } => write!(f, "line {line}: {message}"),
            TrajectoryError::UnknownNode { id, label } => {
                write!(f, "trajectory {id}: UnknownNode `{label}`")
            }
            TrajectoryError::NonEdgeStep { id, from, to } => {
                write!(f, "trajectory {id}: NonEdgeStep `{from}` -> `{to}`")
            }
            TrajectoryError::DuplicateId(id) => write!(f, "trajectory {id}: DuplicateId"),
            TrajectoryError::TooShort(id) => write!(f, "trajectory {id}: TooShort"),
        }
    }
}
