use thiserror::Error;

use crate::graph::{EdgeId, VertexId};

/// Errors reported by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NclError {
    #[error("vertex {0} is listed more than once")]
    DuplicateVertex(VertexId),
    #[error("edge {edge} references unknown vertex {vertex}")]
    UnknownVertex { edge: EdgeId, vertex: VertexId },
    #[error("vertex {0} is not part of the graph")]
    MissingVertex(VertexId),
    #[error("edge {0} is not part of the graph")]
    MissingEdge(EdgeId),
    #[error("orientation covers {actual} edges but the graph has {expected}")]
    OrientationLength { expected: usize, actual: usize },
    #[error("edge {0} is a loop and has no second direction")]
    LoopReversed(EdgeId),
    #[error("the {0} orientation is not feasible")]
    Infeasible(&'static str),
    #[error("step {index} of the sequence is invalid: {reason}")]
    InvalidSequence { index: usize, reason: String },
    #[error("instance has {actual} {what}, above the configured cap of {cap}")]
    CapExceeded {
        what: &'static str,
        actual: usize,
        cap: usize,
    },
    #[error("the graph is not an AND/OR constraint graph: {0}")]
    NotAndOr(String),
    #[error("the two orientations differ on blue edge {0}")]
    BlueMismatch(EdgeId),
    #[error("arc set is not balanced at vertex {0}")]
    Unbalanced(VertexId),
    #[error("class pair is malformed: {0}")]
    MalformedClass(String),
    #[error("flow network is malformed: {0}")]
    MalformedNetwork(String),
    #[error("arithmetic overflow while {0}")]
    Overflow(&'static str),
    #[error("single-weight instance is malformed: {0}")]
    MalformedDemands(String),
    #[error("{path}: {message}")]
    Input { path: String, message: String },
    #[error("generator gave up after {0} attempts")]
    GeneratorExhausted(usize),
}

pub type Result<T> = std::result::Result<T, NclError>;
