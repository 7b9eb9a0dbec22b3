//! Incremental Louvain over an edge stream.
//!
//! The state is two-level: the original graph with its partition (the lower
//! level) and the aggregated supergraph with one supervertex per community
//! (the upper level). Each event is absorbed in three phases:
//!
//! 1. Compute the affected set *before* editing the graph: an edge between
//!    two communities touches both of them wholesale, an intra-community
//!    edit touches the shared community (removal) or nothing (addition).
//! 2. Disband every affected community into singletons; untouched
//!    communities keep their membership and canonical ids.
//! 3. Re-synchronize the supergraph, then iterate local moves on the
//!    supergraph, projecting each round down to the lower level and
//!    re-aggregating, until the modularity gain drops to [`MOVE_EPS`].
//!
//! Because the optimizer only works on the supergraph after the affected
//! region was dissolved, events far from a community leave it untouched:
//! community ids stay stable across steps, which is the point of the
//! incremental scheme.

use crate::error::{Error, Result};
use crate::graph::{CommunityId, DynGraph, VertexId};
use crate::louvain::{aggregate, modularity, one_level, Partition, MOVE_EPS};
use crate::temporal::EdgeEvent;
use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

/// Vertices and communities dissolved by one event.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AffectedSet {
    pub vertices: BTreeSet<VertexId>,
    pub communities: BTreeSet<CommunityId>,
}

impl AffectedSet {
    /// Whether the event dissolves nothing.
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Outcome of absorbing one event.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    /// Modularity of the lower-level partition after convergence; 0 when
    /// the graph has no edges left.
    pub modularity: f64,
    /// Number of vertices whose canonical community id differs from before
    /// the step (new vertices count).
    pub changed_vertices: usize,
    /// Processing time of the step.
    pub elapsed: Duration,
}

/// Two-level incremental Louvain state.
#[derive(Debug, Clone)]
pub struct DynLouvain {
    ll_graph: DynGraph,
    ll_partition: Partition,
    ul_graph: DynGraph,
    modularity: f64,
    old_modularity: f64,
}

impl DynLouvain {
    /// Starts from `g` with singleton communities. The optimizer has not
    /// run yet; call [`DynLouvain::optimize`] or feed events.
    pub fn new(g: DynGraph) -> Result<Self> {
        let ll_partition = Partition::singletons(&g);
        let ul_graph = aggregate(&g, &ll_partition)?;
        let modularity = quality_or_zero(&g, &ll_partition)?;
        Ok(DynLouvain { ll_graph: g, ll_partition, ul_graph, modularity, old_modularity: 0.0 })
    }

    /// Starts from `g` with an explicit community mapping.
    pub fn with_mapping(g: DynGraph, mapping: &BTreeMap<VertexId, CommunityId>) -> Result<Self> {
        let mut ll_partition = Partition::from_mapping(&g, mapping)?;
        ll_partition.canonicalize();
        let ul_graph = aggregate(&g, &ll_partition)?;
        let modularity = quality_or_zero(&g, &ll_partition)?;
        Ok(DynLouvain { ll_graph: g, ll_partition, ul_graph, modularity, old_modularity: 0.0 })
    }

    /// The lower-level graph.
    pub fn graph(&self) -> &DynGraph {
        &self.ll_graph
    }

    /// The lower-level partition.
    pub fn partition(&self) -> &Partition {
        &self.ll_partition
    }

    /// The aggregated upper-level graph.
    pub fn ul_graph(&self) -> &DynGraph {
        &self.ul_graph
    }

    /// Modularity after the most recent convergence (0 for an edgeless
    /// graph).
    pub fn last_modularity(&self) -> f64 {
        self.modularity
    }

    /// Modularity before the most recent step.
    pub fn previous_modularity(&self) -> f64 {
        self.old_modularity
    }

    /// Replaces the community assignment in place, rebuilding the caches,
    /// the upper-level network, and the stored modularity. The mapping
    /// must cover exactly the graph's vertices.
    pub fn set_partition(&mut self, mapping: &BTreeMap<VertexId, CommunityId>) -> Result<()> {
        let mut ll_partition = Partition::from_mapping(&self.ll_graph, mapping)?;
        ll_partition.canonicalize();
        self.ul_graph = aggregate(&self.ll_graph, &ll_partition)?;
        self.modularity = quality_or_zero(&self.ll_graph, &ll_partition)?;
        self.ll_partition = ll_partition;
        Ok(())
    }

    /// Affected set for inserting edge (u, v), evaluated against the
    /// current partition. Empty when the edge lands inside one community;
    /// otherwise both endpoint communities dissolve wholesale, with new
    /// vertices contributing themselves.
    pub fn affected_by_addition(&self, u: VertexId, v: VertexId) -> Result<AffectedSet> {
        let known_u = self.ll_graph.contains_vertex(u);
        let known_v = self.ll_graph.contains_vertex(v);
        if known_u && known_v && self.ll_partition.community_of(u)? == self.ll_partition.community_of(v)? {
            return Ok(AffectedSet::default());
        }
        let mut affected = AffectedSet::default();
        for (known, x) in [(known_u, u), (known_v, v)] {
            if known {
                let c = self.ll_partition.community_of(x)?;
                affected.communities.insert(c);
                affected.vertices.extend(self.ll_partition.members(c)?);
            } else {
                affected.vertices.insert(x);
            }
        }
        Ok(affected)
    }

    /// Affected set for removing edge (u, v): the shared community for an
    /// intra-community edge, nothing for an inter-community edge.
    pub fn affected_by_removal(&self, u: VertexId, v: VertexId) -> Result<AffectedSet> {
        if !self.ll_graph.has_edge(u, v) {
            return Err(Error::MissingEdge(u, v));
        }
        let cu = self.ll_partition.community_of(u)?;
        let cv = self.ll_partition.community_of(v)?;
        if cu != cv {
            return Ok(AffectedSet::default());
        }
        let mut affected = AffectedSet::default();
        affected.communities.insert(cu);
        affected.vertices.extend(self.ll_partition.members(cu)?);
        Ok(affected)
    }

    /// Reassigns every affected vertex to a fresh singleton community and
    /// refreshes the partition sums against the current graph. Untouched
    /// assignments are preserved.
    pub fn disband(&mut self, affected: &AffectedSet) -> Result<()> {
        for &v in &affected.vertices {
            if !self.ll_graph.contains_vertex(v) {
                return Err(Error::UnknownVertex(v));
            }
        }
        let mut mapping = self.ll_partition.canonical_mapping();
        for &v in &affected.vertices {
            mapping.insert(v, v);
        }
        self.ll_partition = Partition::from_mapping(&self.ll_graph, &mapping)?;
        Ok(())
    }

    /// Rebuilds the upper level so that it equals the aggregate of the
    /// lower level. The affected set names the supervertices an
    /// incremental rebuild would touch; rebuilding all rows from scratch
    /// satisfies the same postcondition bit for bit, since aggregation is a
    /// deterministic function of the lower level.
    pub fn sync_communities(&mut self, _affected: &AffectedSet) -> Result<()> {
        self.ul_graph = aggregate(&self.ll_graph, &self.ll_partition)?;
        Ok(())
    }

    /// Runs local moves on the upper level, projecting each improving round
    /// down to the lower level and re-aggregating, until the modularity
    /// gain is at most [`MOVE_EPS`].
    pub fn optimize(&mut self) -> Result<()> {
        self.modularity = quality_or_zero(&self.ll_graph, &self.ll_partition)?;
        loop {
            let mut aux = Partition::singletons(&self.ul_graph);
            if !one_level(&self.ul_graph, &mut aux)? {
                break;
            }
            aux.canonicalize();
            let moves = aux.mapping();
            let mut mapping = self.ll_partition.canonical_mapping();
            for c in mapping.values_mut() {
                *c = moves[c];
            }
            self.ll_partition = Partition::from_mapping(&self.ll_graph, &mapping)?;
            let new_mod = modularity(&self.ll_graph, &self.ll_partition)?;
            self.ul_graph = aggregate(&self.ll_graph, &self.ll_partition)?;
            let gain = new_mod - self.modularity;
            self.modularity = new_mod;
            if gain <= MOVE_EPS {
                break;
            }
        }
        Ok(())
    }

    /// Absorbs one event: affected-set computation, graph edit, disband,
    /// upper-level sync, then convergence.
    ///
    /// Removing an edge that is not present fails without touching the
    /// state.
    pub fn step(&mut self, event: &EdgeEvent) -> Result<StepReport> {
        let started = Instant::now();
        let before = self.ll_partition.canonical_mapping();
        let affected = match *event {
            EdgeEvent::Add { src, dst, weight, .. } => {
                let affected = self.affected_by_addition(src, dst)?;
                self.ll_graph.add_edge(src, dst, weight)?;
                affected
            }
            EdgeEvent::Remove { src, dst, .. } => {
                let affected = self.affected_by_removal(src, dst)?;
                self.ll_graph.remove_edge(src, dst)?;
                affected
            }
        };
        self.disband(&affected)?;
        self.sync_communities(&affected)?;
        self.old_modularity = self.modularity;
        self.optimize()?;
        let after = self.ll_partition.canonical_mapping();
        let changed_vertices = after
            .iter()
            .filter(|(v, c)| before.get(v) != Some(c))
            .count();
        Ok(StepReport {
            modularity: self.modularity,
            changed_vertices,
            elapsed: started.elapsed(),
        })
    }

    /// The vertex → community mapping under canonical (smallest member)
    /// ids.
    pub fn community_mapping(&self) -> BTreeMap<VertexId, CommunityId> {
        self.ll_partition.canonical_mapping()
    }

    /// Modularity of the current lower-level partition.
    pub fn quality(&self) -> Result<f64> {
        modularity(&self.ll_graph, &self.ll_partition)
    }
}

fn quality_or_zero(g: &DynGraph, p: &Partition) -> Result<f64> {
    if g.two_m() > 0.0 {
        modularity(g, p)
    } else {
        Ok(0.0)
    }
}
