//! Error types shared across the simulator.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("edge list line {line}: expected two integer ids, got {content:?}")]
    Parse { line: usize, content: String },
    #[error("edge list produced an empty graph")]
    Empty,
    #[error("invalid graph parameter: {0}")]
    Param(String),
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("traces ({traces}) and assignments ({assignments}) differ in length")]
    LengthMismatch { traces: usize, assignments: usize },
}

#[derive(Debug, Error)]
pub enum ReplicationError {
    #[error("author {author} is not a friend of owner {owner}")]
    NotFriend { author: u32, owner: u32 },
    #[error("item of size {size} exceeds replica capacity {capacity}")]
    Oversize { size: u32, capacity: u32 },
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Invalid(String),
    #[error("unknown combination {0:?}: expected C1..C8 or a pfd,psd,pas triple")]
    UnknownCombination(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
