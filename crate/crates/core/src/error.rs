use alloc::string::String;

use crate::graph::NodeId;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("node {node} out of range (node_count = {node_count})")]
    NodeOutOfRange { node: NodeId, node_count: usize },
    #[error("negative or non-finite weight {weight} on edge ({src}, {dst})")]
    InvalidWeight { src: NodeId, dst: NodeId, weight: f64 },
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("edges given for a graph with zero nodes")]
    EdgesWithoutNodes,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("empty embedding matrix")]
    EmptyMatrix,
    #[error("empty seed set")]
    EmptySeeds,
    #[error("terminals {a} and {b} lie in different components")]
    Disconnected { a: NodeId, b: NodeId },
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("token budget {budget} is smaller than the template skeleton ({skeleton} tokens)")]
    BudgetTooSmall { budget: usize, skeleton: usize },
    #[error("unresolved placeholder `{placeholder}` in {field}")]
    UnresolvedPlaceholder { field: &'static str, placeholder: String },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("generation failed: {0}")]
    Generation(#[from] crate::generation::GenerationError),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
