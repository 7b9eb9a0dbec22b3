//! Density-driven community post-processing.
//!
//! Streams can leave a community internally disconnected (its bridge edges
//! evicted or removed) without the modularity optimizer noticing. This pass
//! measures every community's structural density, and when a community has
//! fallen into several connected components whose mean density beats the
//! whole community's density, each component becomes its own community.
//!
//! Density is unweighted (edge presence only) and ignores self-loops;
//! singleton communities score 0. One pass per call: components are final,
//! never re-split recursively.

use crate::error::{Error, Result};
use crate::graph::{CommunityId, DynGraph, VertexId};
use crate::louvain::Partition;
use std::collections::{BTreeMap, BTreeSet};

/// Outcome of one [`optimize_density`] pass.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityReport {
    /// Average community density before the pass.
    pub adc_before: f64,
    /// Average community density after the pass.
    pub adc_after: f64,
    /// Each split community with the ids it broke into.
    pub splits: Vec<(CommunityId, Vec<CommunityId>)>,
}

/// Unweighted density of the community `members`: present internal edges
/// over possible pairs, self-loops excluded. Singletons score 0.
pub fn community_density(g: &DynGraph, members: &BTreeSet<VertexId>) -> Result<f64> {
    if members.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = members.len();
    let mut present = 0usize;
    for &u in members {
        for (v, _) in g.neighbors(u)? {
            if v > u && members.contains(&v) {
                present += 1;
            }
        }
    }
    if n < 2 {
        return Ok(0.0);
    }
    Ok(2.0 * present as f64 / (n as f64 * (n - 1) as f64))
}

/// Average community density of the partition: the unweighted mean of
/// [`community_density`] over all communities.
pub fn adc(g: &DynGraph, p: &Partition) -> Result<f64> {
    let groups = community_groups(p);
    if groups.is_empty() {
        return Err(Error::EmptyInput);
    }
    let densities = map_communities(&groups, |members| community_density(g, members))?;
    Ok(densities.iter().sum::<f64>() / groups.len() as f64)
}

/// Splits every community that has more than one connected component and
/// whose mean component density strictly exceeds its own density. Each
/// component receives its smallest member as the new community id.
/// Returns the (possibly refined) partition and the density report.
pub fn optimize_density(g: &DynGraph, p: &Partition) -> Result<(Partition, DensityReport)> {
    let adc_before = adc(g, p)?;
    let groups = community_groups(p);
    let decisions = map_communities(&groups, |members| split_components(g, members))?;
    let mut mapping = p.canonical_mapping();
    let mut splits = Vec::new();
    for ((&c, _), components) in groups.iter().zip(decisions) {
        let Some(components) = components else { continue };
        let mut new_ids = Vec::new();
        for component in components {
            let id = *component.first().expect("components are nonempty");
            new_ids.push(id);
            for v in component {
                mapping.insert(v, id);
            }
        }
        splits.push((c, new_ids));
    }
    let refined = Partition::from_mapping(g, &mapping)?;
    let adc_after = adc(g, &refined)?;
    Ok((refined, DensityReport { adc_before, adc_after, splits }))
}

/// Components of one community if the split guard fires, `None` to keep it.
fn split_components(g: &DynGraph, members: &BTreeSet<VertexId>) -> Result<Option<Vec<BTreeSet<VertexId>>>> {
    let components = g.connected_components(members)?;
    if components.len() < 2 {
        return Ok(None);
    }
    let whole = community_density(g, members)?;
    let mut mean = 0.0;
    for component in &components {
        mean += community_density(g, component)?;
    }
    mean /= components.len() as f64;
    if mean > whole {
        Ok(Some(components))
    } else {
        Ok(None)
    }
}

fn community_groups(p: &Partition) -> BTreeMap<CommunityId, BTreeSet<VertexId>> {
    let mut groups: BTreeMap<CommunityId, BTreeSet<VertexId>> = BTreeMap::new();
    for (v, c) in p.canonical_mapping() {
        groups.entry(c).or_default().insert(v);
    }
    groups
}

#[cfg(feature = "parallel")]
fn map_communities<T: Send>(
    groups: &BTreeMap<CommunityId, BTreeSet<VertexId>>,
    f: impl Fn(&BTreeSet<VertexId>) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    use rayon::prelude::*;
    let items: Vec<&BTreeSet<VertexId>> = groups.values().collect();
    items.par_iter().map(|members| f(members)).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_communities<T>(
    groups: &BTreeMap<CommunityId, BTreeSet<VertexId>>,
    f: impl Fn(&BTreeSet<VertexId>) -> Result<T>,
) -> Result<Vec<T>> {
    groups.values().map(|members| f(members)).collect()
}
