//! Partitions, modularity, and the static Louvain optimizer.
//!
//! A [`Partition`] caches, per community, the doubled internal weight
//! (`in_c`, self-loops counted twice) and the total member degree (`tot_c`),
//! so modularity and move gains are O(1) given the neighbor weight sums.
//! Modularity is `Q = Σ_c in_c/2m − (tot_c/2m)²`.
//!
//! Determinism: [`one_level`] sweeps vertices in descending id order and
//! breaks gain ties toward the largest community id; both choices are fixed
//! so repeated runs and the incremental optimizer agree bit for bit. A move
//! is taken only when its gain exceeds [`MOVE_EPS`].

use crate::error::{Error, Result};
use crate::graph::{CommunityId, DynGraph, VertexId, Weight};
use std::collections::BTreeMap;

/// Minimum modularity gain for a vertex move or an optimizer round to count
/// as an improvement.
pub const MOVE_EPS: f64 = 1e-9;

/// Gains within this distance are treated as ties; the candidate seen first
/// (largest community id) is kept.
const GAIN_TIE_EPS: f64 = 1e-15;

/// Assignment of vertices to communities with cached modularity sums.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    community_of: BTreeMap<VertexId, CommunityId>,
    /// Doubled internal weight per community: each internal edge twice,
    /// each self-loop twice.
    in_weight: BTreeMap<CommunityId, Weight>,
    /// Summed weighted degree of the members of each community.
    tot_weight: BTreeMap<CommunityId, Weight>,
    size: BTreeMap<CommunityId, usize>,
}

impl Partition {
    /// Every vertex in its own community, labeled by its own id.
    pub fn singletons(g: &DynGraph) -> Self {
        let mut p = Partition {
            community_of: BTreeMap::new(),
            in_weight: BTreeMap::new(),
            tot_weight: BTreeMap::new(),
            size: BTreeMap::new(),
        };
        for v in g.vertices() {
            p.community_of.insert(v, v);
            p.in_weight.insert(v, 2.0 * g.self_loop(v));
            p.tot_weight.insert(v, g.weighted_degree(v).expect("vertex just listed"));
            p.size.insert(v, 1);
        }
        p
    }

    /// Builds a partition from an explicit vertex → community mapping.
    ///
    /// The mapping must cover exactly the vertices of `g`.
    pub fn from_mapping(g: &DynGraph, mapping: &BTreeMap<VertexId, CommunityId>) -> Result<Self> {
        for &v in mapping.keys() {
            if !g.contains_vertex(v) {
                return Err(Error::UnknownVertex(v));
            }
        }
        let mut p = Partition {
            community_of: BTreeMap::new(),
            in_weight: BTreeMap::new(),
            tot_weight: BTreeMap::new(),
            size: BTreeMap::new(),
        };
        for v in g.vertices() {
            let &c = mapping
                .get(&v)
                .ok_or_else(|| Error::InvalidConfig(format!("vertex {v} has no community")))?;
            p.community_of.insert(v, c);
            *p.size.entry(c).or_insert(0) += 1;
            p.in_weight.entry(c).or_insert(0.0);
            p.tot_weight.entry(c).or_insert(0.0);
        }
        for v in g.vertices() {
            let c = p.community_of[&v];
            *p.tot_weight.get_mut(&c).unwrap() += g.weighted_degree(v)?;
            let mut internal = 0.0;
            for (u, w) in g.neighbors(v)? {
                if u == v {
                    internal += 2.0 * w;
                } else if p.community_of[&u] == c {
                    internal += w;
                }
            }
            *p.in_weight.get_mut(&c).unwrap() += internal;
        }
        Ok(p)
    }

    /// Community of vertex `v`.
    pub fn community_of(&self, v: VertexId) -> Result<CommunityId> {
        self.community_of.get(&v).copied().ok_or(Error::UnknownVertex(v))
    }

    /// Live community ids in ascending order.
    pub fn communities(&self) -> impl Iterator<Item = CommunityId> + '_ {
        self.size.keys().copied()
    }

    /// Number of communities.
    pub fn community_count(&self) -> usize {
        self.size.len()
    }

    /// Number of vertices covered.
    pub fn vertex_count(&self) -> usize {
        self.community_of.len()
    }

    /// Members of community `c` in ascending order.
    pub fn members(&self, c: CommunityId) -> Result<Vec<VertexId>> {
        if !self.size.contains_key(&c) {
            return Err(Error::UnknownCommunity(c));
        }
        Ok(self
            .community_of
            .iter()
            .filter(|&(_, &cc)| cc == c)
            .map(|(&v, _)| v)
            .collect())
    }

    /// Doubled internal weight of community `c`.
    pub fn in_weight(&self, c: CommunityId) -> Result<Weight> {
        self.in_weight.get(&c).copied().ok_or(Error::UnknownCommunity(c))
    }

    /// Total member degree of community `c`.
    pub fn tot_weight(&self, c: CommunityId) -> Result<Weight> {
        self.tot_weight.get(&c).copied().ok_or(Error::UnknownCommunity(c))
    }

    /// A copy of the vertex → community mapping under current labels.
    pub fn mapping(&self) -> BTreeMap<VertexId, CommunityId> {
        self.community_of.clone()
    }

    /// The mapping with every community relabeled to its smallest member.
    pub fn canonical_mapping(&self) -> BTreeMap<VertexId, CommunityId> {
        let mut label: BTreeMap<CommunityId, CommunityId> = BTreeMap::new();
        // Ascending iteration: the first member seen per community is the
        // smallest.
        for (&v, &c) in &self.community_of {
            label.entry(c).or_insert(v);
        }
        self.community_of.iter().map(|(&v, &c)| (v, label[&c])).collect()
    }

    /// Relabels every community to its smallest member id, preserving all
    /// cached sums.
    pub fn canonicalize(&mut self) {
        let mut label: BTreeMap<CommunityId, CommunityId> = BTreeMap::new();
        for (&v, &c) in &self.community_of {
            label.entry(c).or_insert(v);
        }
        self.community_of = self.community_of.iter().map(|(&v, &c)| (v, label[&c])).collect();
        self.in_weight = self.in_weight.iter().map(|(c, &w)| (label[c], w)).collect();
        self.tot_weight = self.tot_weight.iter().map(|(c, &w)| (label[c], w)).collect();
        self.size = self.size.iter().map(|(c, &n)| (label[c], n)).collect();
    }

    /// Moves `v` into existing community `to`, updating the cached sums.
    /// Moving a vertex into its own community is a no-op.
    pub fn move_vertex(&mut self, g: &DynGraph, v: VertexId, to: CommunityId) -> Result<()> {
        let a = self.community_of(v)?;
        if a == to {
            return Ok(());
        }
        if !self.size.contains_key(&to) {
            return Err(Error::UnknownCommunity(to));
        }
        let kv = g.weighted_degree(v)?;
        let sl = g.self_loop(v);
        let mut k_old = 0.0;
        let mut k_new = 0.0;
        for (u, w) in g.neighbors(v)? {
            if u == v {
                continue;
            }
            let cu = self.community_of[&u];
            if cu == a {
                k_old += w;
            } else if cu == to {
                k_new += w;
            }
        }
        *self.in_weight.get_mut(&a).unwrap() -= 2.0 * k_old + 2.0 * sl;
        *self.tot_weight.get_mut(&a).unwrap() -= kv;
        let remaining = self.size.get_mut(&a).unwrap();
        *remaining -= 1;
        if *remaining == 0 {
            self.size.remove(&a);
            self.in_weight.remove(&a);
            self.tot_weight.remove(&a);
        }
        *self.in_weight.get_mut(&to).unwrap() += 2.0 * k_new + 2.0 * sl;
        *self.tot_weight.get_mut(&to).unwrap() += kv;
        *self.size.get_mut(&to).unwrap() += 1;
        self.community_of.insert(v, to);
        Ok(())
    }
}

/// Modularity of `p` over `g` from the cached community sums.
pub fn modularity(g: &DynGraph, p: &Partition) -> Result<Weight> {
    let w2 = g.two_m();
    if w2 <= 0.0 {
        return Err(Error::UndefinedModularity);
    }
    let mut q = 0.0;
    for (c, &inw) in &p.in_weight {
        let tot = p.tot_weight[c];
        q += inw / w2 - (tot / w2) * (tot / w2);
    }
    Ok(q)
}

/// Exact modularity change of moving `v` into `target`, evaluated against
/// the pre-move sums. Zero when `target` is already v's community.
pub fn move_gain(g: &DynGraph, p: &Partition, v: VertexId, target: CommunityId) -> Result<Weight> {
    let a = p.community_of(v)?;
    if !p.size.contains_key(&target) {
        return Err(Error::UnknownCommunity(target));
    }
    if a == target {
        return Ok(0.0);
    }
    let w2 = g.two_m();
    if w2 <= 0.0 {
        return Err(Error::UndefinedModularity);
    }
    let kv = g.weighted_degree(v)?;
    let mut k_old = 0.0;
    let mut k_new = 0.0;
    for (u, w) in g.neighbors(v)? {
        if u == v {
            continue;
        }
        let cu = p.community_of[&u];
        if cu == a {
            k_old += w;
        } else if cu == target {
            k_new += w;
        }
    }
    let tot_a = p.tot_weight[&a];
    let tot_t = p.tot_weight[&target];
    Ok(2.0 * (k_new - k_old) / w2 - 2.0 * kv * (tot_t - tot_a + kv) / (w2 * w2))
}

/// One local-move phase: repeated descending-id sweeps, moving each vertex
/// to the neighboring community with the largest positive gain, until a full
/// sweep moves nothing. Returns whether any move was made.
pub fn one_level(g: &DynGraph, p: &mut Partition) -> Result<bool> {
    let w2 = g.two_m();
    if w2 <= 0.0 {
        return Ok(false);
    }
    let vertices: Vec<VertexId> = g.vertices().collect();
    let mut improved = false;
    let mut moved = true;
    while moved {
        moved = false;
        for &v in vertices.iter().rev() {
            let a = p.community_of[&v];
            let kv = g.weighted_degree(v)?;
            let mut k_in: BTreeMap<CommunityId, Weight> = BTreeMap::new();
            for (u, w) in g.neighbors(v)? {
                if u != v {
                    *k_in.entry(p.community_of[&u]).or_insert(0.0) += w;
                }
            }
            let k_old = k_in.get(&a).copied().unwrap_or(0.0);
            let tot_a = p.tot_weight[&a];
            let mut best_gain = 0.0;
            let mut best_c = a;
            // Descending candidate order: on a tie the largest id wins.
            for (&c, &k_new) in k_in.iter().rev() {
                if c == a {
                    continue;
                }
                let tot_c = p.tot_weight[&c];
                let gain = 2.0 * (k_new - k_old) / w2 - 2.0 * kv * (tot_c - tot_a + kv) / (w2 * w2);
                if gain > best_gain + GAIN_TIE_EPS {
                    best_gain = gain;
                    best_c = c;
                }
            }
            if best_c != a && best_gain > MOVE_EPS {
                p.move_vertex(g, v, best_c)?;
                moved = true;
                improved = true;
            }
        }
    }
    Ok(improved)
}

/// Per-community row used to assemble the aggregated supergraph: the stored
/// self-loop plus the cross weights toward every other community.
///
/// `members` must be the ascending member list of `c` under `mapping`, and
/// `mapping` must be canonical. The stored self-loop is half the doubled
/// internal weight, so the supervertex degree equals the community's `tot`.
fn community_row(
    g: &DynGraph,
    mapping: &BTreeMap<VertexId, CommunityId>,
    c: CommunityId,
    members: &[VertexId],
) -> Result<(Weight, BTreeMap<CommunityId, Weight>)> {
    let mut loop_w = 0.0;
    let mut intra = 0.0;
    let mut cross: BTreeMap<CommunityId, Weight> = BTreeMap::new();
    for &u in members {
        for (v, w) in g.neighbors(u)? {
            if v == u {
                loop_w += w;
            } else if mapping[&v] == c {
                intra += w;
            } else {
                *cross.entry(mapping[&v]).or_insert(0.0) += w;
            }
        }
    }
    // Each internal edge was seen from both endpoints.
    Ok((loop_w + intra / 2.0, cross))
}

/// Collapses each community of `p` into one supervertex labeled by the
/// community's canonical (smallest member) id.
///
/// The supervertex self-loop stores the community's internal weight, so the
/// total weight 2m is preserved and modularity of the singleton partition on
/// the result equals modularity of `p` on `g`.
pub fn aggregate(g: &DynGraph, p: &Partition) -> Result<DynGraph> {
    let mapping = p.canonical_mapping();
    let mut groups: BTreeMap<CommunityId, Vec<VertexId>> = BTreeMap::new();
    for (&v, &c) in &mapping {
        groups.entry(c).or_default().push(v);
    }
    let rows = community_rows(g, &mapping, &groups)?;
    let mut sg = DynGraph::new();
    for ((&c, _), (loop_w, cross)) in groups.iter().zip(rows) {
        sg.add_vertex(c);
        if loop_w > 0.0 {
            sg.add_edge(c, c, loop_w)?;
        }
        for (d, w) in cross {
            // The lower community's accumulation defines the edge weight;
            // the mirrored sum from d's row is skipped.
            if d > c {
                sg.add_edge(c, d, w)?;
            }
        }
    }
    Ok(sg)
}

#[cfg(feature = "parallel")]
fn community_rows(
    g: &DynGraph,
    mapping: &BTreeMap<VertexId, CommunityId>,
    groups: &BTreeMap<CommunityId, Vec<VertexId>>,
) -> Result<Vec<(Weight, BTreeMap<CommunityId, Weight>)>> {
    use rayon::prelude::*;
    let items: Vec<(&CommunityId, &Vec<VertexId>)> = groups.iter().collect();
    items
        .par_iter()
        .map(|(&c, members)| community_row(g, mapping, c, members))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn community_rows(
    g: &DynGraph,
    mapping: &BTreeMap<VertexId, CommunityId>,
    groups: &BTreeMap<CommunityId, Vec<VertexId>>,
) -> Result<Vec<(Weight, BTreeMap<CommunityId, Weight>)>> {
    groups
        .iter()
        .map(|(&c, members)| community_row(g, mapping, c, members))
        .collect()
}

/// Result of [`louvain_full`]: the flat partition on the input graph and the
/// per-level supervertex → community mappings.
#[derive(Debug, Clone)]
pub struct LouvainResult {
    pub partition: Partition,
    pub levels: Vec<BTreeMap<VertexId, CommunityId>>,
}

/// Full multi-level Louvain from scratch: alternate [`one_level`] and
/// [`aggregate`] until a level yields no move.
pub fn louvain_full(g: &DynGraph) -> Result<LouvainResult> {
    if g.vertex_count() == 0 {
        return Err(Error::EmptyInput);
    }
    let mut flat: BTreeMap<VertexId, CommunityId> = g.vertices().map(|v| (v, v)).collect();
    let mut levels = Vec::new();
    let mut cur = g.clone();
    loop {
        let mut p = Partition::singletons(&cur);
        if !one_level(&cur, &mut p)? {
            break;
        }
        p.canonicalize();
        let map = p.mapping();
        for c in flat.values_mut() {
            *c = map[c];
        }
        cur = aggregate(&cur, &p)?;
        levels.push(map);
    }
    Ok(LouvainResult { partition: Partition::from_mapping(g, &flat)?, levels })
}
