//! Error type shared by every module in the crate.

use crate::graph::{CommunityId, Timestamp, VertexId};
use thiserror::Error;

/// Crate-wide error enumeration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Edge weights must be strictly positive and finite.
    #[error("edge weight {0} is outside the positive domain")]
    WeightDomain(f64),

    /// An operation referenced an edge that is not in the graph.
    #[error("edge ({0}, {1}) does not exist")]
    MissingEdge(VertexId, VertexId),

    /// An operation referenced a vertex that is not in the graph.
    #[error("vertex {0} does not exist")]
    UnknownVertex(VertexId),

    /// An operation referenced a community id that is not in the partition.
    #[error("community {0} does not exist")]
    UnknownCommunity(CommunityId),

    /// The operation requires nonempty input.
    #[error("input is empty")]
    EmptyInput,

    /// Modularity is undefined when the graph carries no edge weight.
    #[error("modularity is undefined on a graph without edges")]
    UndefinedModularity,

    /// Event timestamps must be non-decreasing.
    #[error("timestamp {now} arrived after {prev}; events must be time-ordered")]
    OutOfOrder { prev: Timestamp, now: Timestamp },

    /// A configuration value is out of range or inconsistent.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Shorthand used by every fallible operation in the crate.
pub type Result<T> = std::result::Result<T, Error>;
