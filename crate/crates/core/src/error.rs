use thiserror::Error;

use crate::graph::Family;

/// Errors raised by graph construction, queries and transforms.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("graph has {0} nodes; at most 64 are supported")]
    TooManyNodes(usize),

    #[error("self-loop on `{0}`")]
    SelfLoop(String),

    #[error("duplicate edge between `{0}` and `{1}`")]
    DuplicateEdge(String, String),

    #[error("conflicting tags for node `{0}`")]
    ConflictingTag(String),

    #[error("semidirected cycle through {}", .0.join(", "))]
    Cycle(Vec<String>),

    #[error("graph is not a valid {family} graph ({summary})")]
    InvalidFamily { family: Family, summary: String },

    #[error("{0}")]
    Domain(String),

    #[error("enumeration guard exceeded: {0}")]
    GuardExceeded(String),

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("property violation: {0}")]
    PropertyViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
