//! Community detection over evolving graphs.
//!
//! The crate keeps a weighted undirected graph under a stream of edge
//! insertions and deletions and maintains a modularity-optimized partition
//! incrementally: instead of rerunning Louvain from scratch after every
//! event, only the communities touched by the event are disbanded and the
//! optimizer works on the aggregated supergraph ([`dynlouvain`]).
//!
//! Supporting pieces:
//!
//! - [`graph`]: the dynamic weighted graph itself.
//! - [`louvain`]: partitions, modularity, and the static reference optimizer.
//! - [`densopt`]: density-driven post-processing that splits communities
//!   which have fallen apart into disconnected components.
//! - [`window`]: landmark and sliding ingestion windows over event streams.
//! - [`temporal`]: snapshot sequences, time-ordered expansion, and temporal
//!   shortest paths.
//! - [`generator`]: a synthetic benchmark stream with planted, evolving
//!   ground-truth communities.
//! - [`metrics`]: partition similarity, per-step stability, timing.
//!
//! All iteration orders are fixed (sorted maps throughout), so every
//! algorithm is deterministic: same input, bit-identical output. The
//! `parallel` feature (on by default) runs the per-community kernels on a
//! rayon pool; results are identical to the sequential fallback.

pub mod densopt;
pub mod dynlouvain;
pub mod error;
pub mod generator;
pub mod graph;
pub mod louvain;
pub mod metrics;
pub mod temporal;
pub mod window;

pub use error::{Error, Result};
pub use graph::{CommunityId, DynGraph, Timestamp, VertexId, Weight};
pub use louvain::Partition;
pub use temporal::EdgeEvent;

#[cfg(test)]
pub(crate) mod testutil {
    use crate::graph::DynGraph;

    /// The 7-vertex, 8-edge example network used across golden tests:
    /// a triangle {1,2,3} bridged over (3,5) to a 4-cycle-with-chord
    /// {4,5,6,7}.
    pub fn example7() -> DynGraph {
        let mut g = DynGraph::new();
        for (u, v) in [
            (1, 2),
            (1, 3),
            (2, 3),
            (3, 5),
            (4, 5),
            (4, 7),
            (5, 6),
            (6, 7),
        ] {
            g.add_edge(u, v, 1.0).unwrap();
        }
        g
    }
}
