use thiserror::Error;

use crate::graph::NodeId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("node id {id} out of range for graph with {n} nodes")]
    NodeOutOfRange { id: NodeId, n: usize },

    #[error("self-loop at node {0}")]
    SelfLoop(NodeId),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("CONGEST budget exceeded in round {round} on edge {from}->{to}: {bits} bits > {budget}")]
    BudgetExceeded {
        round: usize,
        from: NodeId,
        to: NodeId,
        bits: u64,
        budget: u64,
    },

    #[error("round limit {max_rounds} reached with {unfinished} node(s) still running")]
    Timeout { max_rounds: usize, unfinished: usize },

    #[error("h-partition stalled with {residual} node(s) left unpeeled")]
    Stalled { residual: usize },

    #[error("message decode failed: {0}")]
    Decode(String),

    /// A state the accompanying correctness argument rules out.
    #[error("internal contradiction: {0}")]
    Internal(String),

    #[error("instance too large for exact solver: {n} nodes > cap {cap}")]
    CapExceeded { n: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
