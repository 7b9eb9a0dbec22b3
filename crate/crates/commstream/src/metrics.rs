//! Cross-algorithm evaluation: stability, partition similarity, timing.

use crate::error::{Error, Result};
use crate::graph::{CommunityId, VertexId};
use std::collections::{BTreeMap, BTreeSet};
use std::time::Duration;

/// Fraction of vertices whose canonical community id changed between two
/// mappings. Vertices present in only one mapping count as changed; two
/// empty mappings score 0.
///
/// Both mappings are canonicalized (community id = smallest member) first,
/// so pure label churn without membership change scores 0.
pub fn stability(
    prev: &BTreeMap<VertexId, CommunityId>,
    next: &BTreeMap<VertexId, CommunityId>,
) -> f64 {
    let union: BTreeSet<VertexId> = prev.keys().chain(next.keys()).copied().collect();
    if union.is_empty() {
        return 0.0;
    }
    let prev = canonical(prev);
    let next = canonical(next);
    let changed = union
        .iter()
        .filter(|v| prev.get(v) != next.get(v))
        .count();
    changed as f64 / union.len() as f64
}

/// Normalized mutual information between two partitions of the same vertex
/// set, with arithmetic-mean normalization. 1 iff the partitions are equal
/// up to relabeling; two single-community partitions compare as 1.
pub fn partition_similarity(
    a: &BTreeMap<VertexId, CommunityId>,
    b: &BTreeMap<VertexId, CommunityId>,
) -> Result<f64> {
    if a.is_empty() || a.len() != b.len() || !a.keys().eq(b.keys()) {
        return Err(Error::InvalidConfig(
            "partition similarity requires two nonempty mappings over the same vertices".into(),
        ));
    }
    let n = a.len() as f64;
    let mut count_a: BTreeMap<CommunityId, f64> = BTreeMap::new();
    let mut count_b: BTreeMap<CommunityId, f64> = BTreeMap::new();
    let mut joint: BTreeMap<(CommunityId, CommunityId), f64> = BTreeMap::new();
    for (v, &ca) in a {
        let cb = b[v];
        *count_a.entry(ca).or_insert(0.0) += 1.0;
        *count_b.entry(cb).or_insert(0.0) += 1.0;
        *joint.entry((ca, cb)).or_insert(0.0) += 1.0;
    }
    let entropy = |counts: &BTreeMap<CommunityId, f64>| -> f64 {
        counts.values().map(|&c| { let p = c / n; -p * p.ln() }).sum()
    };
    let ha = entropy(&count_a);
    let hb = entropy(&count_b);
    if ha + hb == 0.0 {
        // Both sides are a single community: identical up to relabeling.
        return Ok(1.0);
    }
    let mut mi = 0.0;
    for (&(ca, cb), &c) in &joint {
        let p = c / n;
        mi += p * (p / (count_a[&ca] / n * (count_b[&cb] / n))).ln();
    }
    Ok((mi / ((ha + hb) / 2.0)).clamp(0.0, 1.0))
}

/// Accumulates processing time across steps.
#[derive(Debug, Clone, Copy, Default)]
pub struct Stopwatch {
    total: Duration,
}

impl Stopwatch {
    /// A stopwatch at zero.
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds one step's duration.
    pub fn add(&mut self, elapsed: Duration) {
        self.total += elapsed;
    }

    /// Cumulative duration so far.
    pub fn total(&self) -> Duration {
        self.total
    }
}

fn canonical(map: &BTreeMap<VertexId, CommunityId>) -> BTreeMap<VertexId, CommunityId> {
    let mut label: BTreeMap<CommunityId, CommunityId> = BTreeMap::new();
    for (&v, &c) in map {
        label.entry(c).or_insert(v);
    }
    map.iter().map(|(&v, &c)| (v, label[&c])).collect()
}
