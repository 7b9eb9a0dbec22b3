//! Dynamic weighted undirected graph.
//!
//! The adjacency structure is a sorted map of sorted maps, so neighbor
//! iteration is always in ascending vertex order and identical runs produce
//! identical float accumulation orders. Self-loops are stored once at
//! `adj[u][u]`; a self-loop of weight `w` contributes `2w` to the vertex
//! degree and to the cached total weight.
//!
//! Edges carry strictly positive weights. Re-adding an existing edge
//! replaces its weight, which makes ingestion idempotent under window
//! replay. Removing an edge never removes its endpoints: vertex removal is
//! expressed by removing all incident edges, and isolated vertices remain
//! valid singletons.

use crate::error::{Error, Result};
use std::collections::{BTreeMap, BTreeSet};

/// Vertex identifier.
pub type VertexId = u64;
/// Community identifier; canonically the smallest member vertex id.
pub type CommunityId = u64;
/// Edge weight.
pub type Weight = f64;
/// Event timestamp.
pub type Timestamp = u64;

/// Weighted undirected graph under edge insertion and removal.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DynGraph {
    /// `adj[u][v]` = weight of edge (u, v); symmetric, self-loop at `adj[u][u]`.
    adj: BTreeMap<VertexId, BTreeMap<VertexId, Weight>>,
    /// Cached total weighted degree, i.e. 2m = sum of weighted_degree over vertices.
    two_m: Weight,
    /// Number of distinct edges (self-loops count as one edge).
    edges: usize,
}

impl DynGraph {
    /// Creates an empty graph.
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts `v` as an isolated vertex if not already present.
    pub fn add_vertex(&mut self, v: VertexId) {
        self.adj.entry(v).or_default();
    }

    /// Inserts edge (u, v) with weight `w`, creating missing endpoints.
    ///
    /// Re-inserting an existing edge replaces its weight. `u == v` stores a
    /// self-loop. Weights must be finite and strictly positive.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId, w: Weight) -> Result<()> {
        if !w.is_finite() || w <= 0.0 {
            return Err(Error::WeightDomain(w));
        }
        let old = self.adj.entry(u).or_default().insert(v, w);
        if u != v {
            self.adj.entry(v).or_default().insert(u, w);
        }
        match old {
            Some(prev) => self.two_m += 2.0 * (w - prev),
            None => {
                self.two_m += 2.0 * w;
                self.edges += 1;
            }
        }
        Ok(())
    }

    /// Removes edge (u, v) and returns its weight. Endpoints are retained
    /// even if they become isolated.
    pub fn remove_edge(&mut self, u: VertexId, v: VertexId) -> Result<Weight> {
        let w = self
            .adj
            .get_mut(&u)
            .and_then(|nb| nb.remove(&v))
            .ok_or(Error::MissingEdge(u, v))?;
        if u != v {
            self.adj.get_mut(&v).map(|nb| nb.remove(&u));
        }
        self.two_m -= 2.0 * w;
        self.edges -= 1;
        Ok(w)
    }

    /// Whether vertex `v` is present.
    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.adj.contains_key(&v)
    }

    /// Weight of edge (u, v), if present.
    pub fn edge_weight(&self, u: VertexId, v: VertexId) -> Option<Weight> {
        self.adj.get(&u).and_then(|nb| nb.get(&v)).copied()
    }

    /// Whether edge (u, v) is present.
    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.edge_weight(u, v).is_some()
    }

    /// Self-loop weight of `v` (0 if none).
    pub fn self_loop(&self, v: VertexId) -> Weight {
        self.edge_weight(v, v).unwrap_or(0.0)
    }

    /// Number of vertices.
    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    /// Number of distinct edges; a self-loop counts as one edge.
    pub fn edge_count(&self) -> usize {
        self.edges
    }

    /// Cached total weighted degree 2m (self-loops counted twice).
    pub fn two_m(&self) -> Weight {
        self.two_m
    }

    /// Vertices in ascending order.
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.adj.keys().copied()
    }

    /// Neighbors of `u` with edge weights, ascending by neighbor id.
    /// Includes the self-loop entry `(u, w)` when present.
    pub fn neighbors(&self, u: VertexId) -> Result<impl Iterator<Item = (VertexId, Weight)> + '_> {
        let nb = self.adj.get(&u).ok_or(Error::UnknownVertex(u))?;
        Ok(nb.iter().map(|(&v, &w)| (v, w)))
    }

    /// Sum of incident edge weights, with the self-loop counted twice.
    pub fn weighted_degree(&self, u: VertexId) -> Result<Weight> {
        let nb = self.adj.get(&u).ok_or(Error::UnknownVertex(u))?;
        let mut d = 0.0;
        for (&v, &w) in nb {
            d += if v == u { 2.0 * w } else { w };
        }
        Ok(d)
    }

    /// Connected components of the subgraph induced by `vertices`, each
    /// sorted ascending, ordered by smallest member.
    pub fn connected_components(
        &self,
        vertices: &BTreeSet<VertexId>,
    ) -> Result<Vec<BTreeSet<VertexId>>> {
        for &v in vertices {
            if !self.contains_vertex(v) {
                return Err(Error::UnknownVertex(v));
            }
        }
        let mut seen = BTreeSet::new();
        let mut components = Vec::new();
        for &start in vertices {
            if !seen.insert(start) {
                continue;
            }
            let mut component = BTreeSet::from([start]);
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                for (y, _) in self.neighbors(x)? {
                    if y != x && vertices.contains(&y) && seen.insert(y) {
                        component.insert(y);
                        stack.push(y);
                    }
                }
            }
            components.push(component);
        }
        Ok(components)
    }

    /// Subgraph induced by `vertices`: all listed vertices (isolated ones
    /// included) and every edge, self-loops included, with both endpoints in
    /// the set.
    pub fn induced_subgraph(&self, vertices: &BTreeSet<VertexId>) -> Result<DynGraph> {
        let mut sub = DynGraph::new();
        for &u in vertices {
            let nb = self.adj.get(&u).ok_or(Error::UnknownVertex(u))?;
            sub.add_vertex(u);
            for (&v, &w) in nb {
                if v >= u && vertices.contains(&v) {
                    sub.add_edge(u, v, w)?;
                }
            }
        }
        Ok(sub)
    }
}
