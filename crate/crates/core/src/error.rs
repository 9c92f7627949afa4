use std::io;

use crate::graph::VertexId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Boxed failure raised inside a user-supplied map or reduce function.
pub type TaskError = Box<dyn std::error::Error + Send + Sync + 'static>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("empty graph")]
    EmptyGraph,

    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),

    #[error("common neighborhood of an empty vertex set is undefined")]
    EmptyVertexSet,

    #[error("invalid biclique: {0}")]
    InvalidBiclique(&'static str),

    #[error("size threshold must be at least 1, got {0}")]
    InvalidThreshold(usize),

    #[error("brute-force oracle refuses graphs with more than {limit} vertices (got {n})")]
    OracleTooLarge { n: usize, limit: usize },

    #[error("vertex {0} has no property in the active vertex order")]
    MissingProperty(VertexId),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("round {round} ({name}): map task failed: {source}")]
    MapFailed {
        round: usize,
        name: String,
        #[source]
        source: TaskError,
    },

    #[error("round {round} ({name}): reduce failed for key {key:?}: {source}")]
    ReduceFailed {
        round: usize,
        name: String,
        key: Vec<u8>,
        #[source]
        source: TaskError,
    },

    #[error("corrupt record stream: {0}")]
    Corrupt(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
