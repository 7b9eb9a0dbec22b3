//! Edge events, snapshot sequences, and time-ordered expansion.
//!
//! A snapshot sequence is a fixed vertex universe plus per-timestamp edge
//! lists. Expanding it over a closed interval replicates every vertex once
//! per timestamp and connects consecutive layers only: a wait edge keeps a
//! vertex in place from `t` to `t+1`, and each snapshot edge at `t+1`
//! becomes a pair of transit edges between the layers. Shortest temporal
//! paths are breadth-first searches over that layered graph, so arrival
//! time is minimized and path timestamps are strictly increasing.

use crate::error::{Error, Result};
use crate::graph::{Timestamp, VertexId, Weight};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// One edge mutation in a stream. Removals carry no weight: the edge is
/// identified by its endpoints alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeEvent {
    Add { src: VertexId, dst: VertexId, weight: Weight, time: Timestamp },
    Remove { src: VertexId, dst: VertexId, time: Timestamp },
}

impl EdgeEvent {
    /// Event timestamp.
    pub fn time(&self) -> Timestamp {
        match *self {
            EdgeEvent::Add { time, .. } | EdgeEvent::Remove { time, .. } => time,
        }
    }

    /// The endpoints as given.
    pub fn endpoints(&self) -> (VertexId, VertexId) {
        match *self {
            EdgeEvent::Add { src, dst, .. } | EdgeEvent::Remove { src, dst, .. } => (src, dst),
        }
    }
}

/// A fixed vertex set with edge snapshots at strictly increasing timestamps.
#[derive(Debug, Clone, Default)]
pub struct SnapshotSequence {
    vertices: BTreeSet<VertexId>,
    snapshots: Vec<(Timestamp, Vec<(VertexId, VertexId)>)>,
}

impl SnapshotSequence {
    /// A sequence over the given vertex universe with no snapshots yet.
    pub fn new(vertices: BTreeSet<VertexId>) -> Self {
        SnapshotSequence { vertices, snapshots: Vec::new() }
    }

    /// Appends the edge set observed at time `t`.
    ///
    /// Timestamps must be strictly increasing and all endpoints must belong
    /// to the vertex universe.
    pub fn push(&mut self, t: Timestamp, edges: Vec<(VertexId, VertexId)>) -> Result<()> {
        if let Some(&(prev, _)) = self.snapshots.last() {
            if t <= prev {
                return Err(Error::OutOfOrder { prev, now: t });
            }
        }
        for &(u, v) in &edges {
            if !self.vertices.contains(&u) {
                return Err(Error::UnknownVertex(u));
            }
            if !self.vertices.contains(&v) {
                return Err(Error::UnknownVertex(v));
            }
        }
        self.snapshots.push((t, edges));
        Ok(())
    }

    /// The vertex universe.
    pub fn vertices(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    /// Edges observed at exactly time `t`, if a snapshot exists there.
    pub fn snapshot_at(&self, t: Timestamp) -> Option<&[(VertexId, VertexId)]> {
        self.snapshots
            .iter()
            .find(|&&(st, _)| st == t)
            .map(|(_, e)| e.as_slice())
    }

    /// All snapshots in time order.
    pub fn snapshots(&self) -> &[(Timestamp, Vec<(VertexId, VertexId)>)] {
        &self.snapshots
    }
}

/// Layered expansion of a snapshot sequence over `[t_start, t_end]`.
#[derive(Debug, Clone)]
pub struct TimeOrderedGraph {
    t_start: Timestamp,
    t_end: Timestamp,
    vertices: BTreeSet<VertexId>,
    /// Successors of `(v, t)` in layer `t + 1`: the wait edge first, then
    /// transit targets in ascending vertex order.
    succ: BTreeMap<(VertexId, Timestamp), Vec<(VertexId, Timestamp)>>,
    transit_edges: usize,
}

impl TimeOrderedGraph {
    /// First timestamp of the expansion.
    pub fn t_start(&self) -> Timestamp {
        self.t_start
    }

    /// Last timestamp of the expansion.
    pub fn t_end(&self) -> Timestamp {
        self.t_end
    }

    /// Number of replicated vertices: |V| per timestamp in the interval.
    pub fn node_count(&self) -> usize {
        self.vertices.len() * ((self.t_end - self.t_start) as usize + 1)
    }

    /// One wait edge per vertex per consecutive layer pair.
    pub fn wait_edge_count(&self) -> usize {
        self.vertices.len() * (self.t_end - self.t_start) as usize
    }

    /// Directed transit edges (two per undirected snapshot edge).
    pub fn transit_edge_count(&self) -> usize {
        self.transit_edges
    }

    /// Whether `v` belongs to the expanded vertex universe.
    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    /// Successors of the replicated node `(v, t)`.
    pub fn successors(&self, v: VertexId, t: Timestamp) -> &[(VertexId, Timestamp)] {
        self.succ.get(&(v, t)).map(|s| s.as_slice()).unwrap_or(&[])
    }
}

/// Expands `seq` into the layered time-ordered graph over `[t_start, t_end]`.
pub fn expand_time_ordered(
    seq: &SnapshotSequence,
    t_start: Timestamp,
    t_end: Timestamp,
) -> Result<TimeOrderedGraph> {
    if seq.vertices().is_empty() {
        return Err(Error::EmptyInput);
    }
    if t_start >= t_end {
        return Err(Error::InvalidConfig(format!(
            "time interval [{t_start}, {t_end}] must satisfy t_start < t_end"
        )));
    }
    let mut succ: BTreeMap<(VertexId, Timestamp), Vec<(VertexId, Timestamp)>> = BTreeMap::new();
    let mut transit_edges = 0;
    for t in t_start..t_end {
        for &v in seq.vertices() {
            succ.insert((v, t), vec![(v, t + 1)]);
        }
        if let Some(edges) = seq.snapshot_at(t + 1) {
            let mut targets: BTreeMap<VertexId, BTreeSet<VertexId>> = BTreeMap::new();
            for &(u, v) in edges {
                if u != v {
                    targets.entry(u).or_default().insert(v);
                    targets.entry(v).or_default().insert(u);
                }
            }
            for (v, nbrs) in targets {
                let row = succ.get_mut(&(v, t)).expect("layer row inserted above");
                // Wait edge stays first; transit targets follow ascending.
                row.extend(nbrs.iter().map(|&n| (n, t + 1)));
                transit_edges += nbrs.len();
            }
        }
    }
    Ok(TimeOrderedGraph {
        t_start,
        t_end,
        vertices: seq.vertices().clone(),
        succ,
        transit_edges,
    })
}

/// Earliest-arrival temporal path from `src` (departing at `t_start`) to any
/// replica of `dst`, as a sequence of `(vertex, time)` hops. `None` when
/// `dst` is unreachable within the horizon.
pub fn temporal_shortest_path(
    g: &TimeOrderedGraph,
    src: VertexId,
    dst: VertexId,
) -> Result<Option<Vec<(VertexId, Timestamp)>>> {
    if !g.contains_vertex(src) {
        return Err(Error::UnknownVertex(src));
    }
    if !g.contains_vertex(dst) {
        return Err(Error::UnknownVertex(dst));
    }
    let start = (src, g.t_start());
    if src == dst {
        return Ok(Some(vec![start]));
    }
    let mut parent: BTreeMap<(VertexId, Timestamp), (VertexId, Timestamp)> = BTreeMap::new();
    let mut queue = VecDeque::from([start]);
    let mut seen = BTreeSet::from([start]);
    while let Some(node) = queue.pop_front() {
        for &next in g.successors(node.0, node.1) {
            if !seen.insert(next) {
                continue;
            }
            parent.insert(next, node);
            if next.0 == dst {
                let mut path = vec![next];
                let mut cur = next;
                while let Some(&p) = parent.get(&cur) {
                    path.push(p);
                    cur = p;
                }
                path.reverse();
                return Ok(Some(path));
            }
            queue.push_back(next);
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Vertex ids in the path tests: 1 = A, 2 = B, 3 = C, 4 = D.
    fn abcd_sequence() -> SnapshotSequence {
        let mut seq = SnapshotSequence::new(BTreeSet::from([1, 2, 3, 4]));
        seq.push(1, vec![(1, 3)]).unwrap();
        seq.push(2, vec![(1, 4)]).unwrap();
        seq.push(3, vec![(4, 2)]).unwrap();
        seq
    }

    #[test]
    fn snapshot_timestamps_strictly_increase() {
        let mut seq = SnapshotSequence::new(BTreeSet::from([1, 2]));
        seq.push(1, vec![(1, 2)]).unwrap();
        assert_eq!(seq.push(1, vec![]), Err(Error::OutOfOrder { prev: 1, now: 1 }));
        assert_eq!(seq.push(0, vec![]), Err(Error::OutOfOrder { prev: 1, now: 0 }));
        assert_eq!(seq.push(2, vec![(1, 9)]), Err(Error::UnknownVertex(9)));
    }

    #[test]
    fn expansion_replicates_vertices_per_layer() {
        let seq = SnapshotSequence::new(BTreeSet::from([1, 2]));
        let g = expand_time_ordered(&seq, 0, 1).unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.wait_edge_count(), 2);
        assert_eq!(g.transit_edge_count(), 0);
        assert_eq!(g.successors(1, 0), &[(1, 1)]);
    }

    #[test]
    fn expansion_wires_transit_edges_from_next_snapshot() {
        let seq = abcd_sequence();
        let g = expand_time_ordered(&seq, 0, 3).unwrap();
        assert_eq!(g.node_count(), 16);
        assert!(g.successors(1, 1).contains(&(4, 2)));
        assert!(g.successors(4, 2).contains(&(2, 3)));
        assert!(!g.successors(1, 2).contains(&(4, 3)));
        // Wait edge first, transit targets ascending after it.
        assert_eq!(g.successors(1, 0), &[(1, 1), (3, 1)]);
    }

    #[test]
    fn expansion_rejects_degenerate_input() {
        let empty = SnapshotSequence::default();
        assert!(matches!(expand_time_ordered(&empty, 0, 2), Err(Error::EmptyInput)));
        let seq = abcd_sequence();
        assert!(matches!(expand_time_ordered(&seq, 2, 2), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn golden_temporal_path() {
        let g = expand_time_ordered(&abcd_sequence(), 0, 3).unwrap();
        let path = temporal_shortest_path(&g, 1, 2).unwrap().unwrap();
        assert_eq!(path, vec![(1, 0), (1, 1), (4, 2), (2, 3)]);
    }

    #[test]
    fn path_times_strictly_increase() {
        let g = expand_time_ordered(&abcd_sequence(), 0, 3).unwrap();
        for dst in [2, 3, 4] {
            if let Some(path) = temporal_shortest_path(&g, 1, dst).unwrap() {
                for pair in path.windows(2) {
                    assert_eq!(pair[1].1, pair[0].1 + 1);
                }
            }
        }
    }

    #[test]
    fn trivial_and_unreachable_paths() {
        let g = expand_time_ordered(&abcd_sequence(), 0, 3).unwrap();
        assert_eq!(temporal_shortest_path(&g, 2, 2).unwrap(), Some(vec![(2, 0)]));
        // C only ever touches A at t=1; nothing leads back to C afterwards,
        // and B is never adjacent to C.
        let mut seq = SnapshotSequence::new(BTreeSet::from([1, 2, 3]));
        seq.push(1, vec![(1, 3)]).unwrap();
        let g = expand_time_ordered(&seq, 0, 2).unwrap();
        assert_eq!(temporal_shortest_path(&g, 2, 3).unwrap(), None);
        assert_eq!(temporal_shortest_path(&g, 9, 1), Err(Error::UnknownVertex(9)));
    }
}
