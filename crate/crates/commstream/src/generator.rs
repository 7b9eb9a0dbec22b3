//! Synthetic dynamic-graph benchmark with planted communities.
//!
//! Each vertex belongs to a planted community and keeps drawing
//! interactions until it reaches its degree target, preferring partners
//! inside its community (`intra_probability`) over outsiders
//! (`inter_probability`). Interactions decay: an edge not re-drawn for
//! `decay_ttl` iterations is removed. Degree targets and community sizes
//! are both heavy-tailed (discrete power law via inverse CDF).
//!
//! An iteration whose communities all reach internal density of at least
//! `intra_probability / 2` is *stable*: the planted partition is recorded
//! as ground truth, and with `event_probability` the structure then drifts
//! by a planted merge of two communities or a split of one into random
//! halves.
//!
//! Everything is driven by one seeded ChaCha stream over sorted
//! containers, so a configuration generates a bit-identical timeline every
//! time.

use crate::error::{Error, Result};
use crate::graph::{CommunityId, Timestamp, VertexId};
use crate::temporal::EdgeEvent;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Smallest planted community size at generation start.
const MIN_COMMUNITY: usize = 3;

/// Degree-target floor factor relative to community size, so planted
/// communities can actually reach the stability density.
const TARGET_FLOOR: f64 = 0.6;

/// Generator configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub n_vertices: usize,
    /// Power-law exponent of the degree-target distribution (> 1).
    pub degree_exponent: f64,
    /// Power-law exponent of the community-size distribution (> 1).
    pub size_exponent: f64,
    /// Probability of drawing an intra-community partner per attempt.
    pub intra_probability: f64,
    /// Probability of drawing an inter-community partner otherwise.
    pub inter_probability: f64,
    /// Iterations an interaction survives without being re-drawn.
    pub decay_ttl: u64,
    /// Chance of planting a merge or split at each stable iteration.
    pub event_probability: f64,
    pub iterations: u64,
    pub seed: u64,
}

impl GenConfig {
    /// Checks ranges and cross-field consistency.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_vertices < MIN_COMMUNITY + 1 {
            return fail(format!("n_vertices must be at least {}", MIN_COMMUNITY + 1));
        }
        if !(self.degree_exponent > 1.0) {
            return fail("degree_exponent must exceed 1".into());
        }
        if !(self.size_exponent > 1.0) {
            return fail("size_exponent must exceed 1".into());
        }
        if !(self.intra_probability > 0.0 && self.intra_probability <= 1.0) {
            return fail("intra_probability must lie in (0, 1]".into());
        }
        if !(self.inter_probability >= 0.0 && self.inter_probability < 1.0) {
            return fail("inter_probability must lie in [0, 1)".into());
        }
        if self.inter_probability >= self.intra_probability {
            return fail("inter_probability must be below intra_probability".into());
        }
        if self.decay_ttl == 0 {
            return fail("decay_ttl must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.event_probability) {
            return fail("event_probability must lie in [0, 1]".into());
        }
        if self.iterations == 0 {
            return fail("iterations must be at least 1".into());
        }
        Ok(())
    }
}

/// A planted structural change at a stable iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlantedEvent {
    /// Union two communities.
    Merge,
    /// Break one community of size ≥ 4 into two random halves.
    Split,
}

/// The generated stream plus the planted ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthTimeline {
    /// Edge events with iteration-index timestamps.
    pub events: Vec<EdgeEvent>,
    /// Planted partition at each stable iteration, strictly increasing.
    pub stable_points: Vec<(u64, BTreeMap<VertexId, CommunityId>)>,
}

/// Applies a merge or split to the planted membership.
///
/// Returns false (leaving the membership untouched, with a logged notice)
/// when the precondition fails: merging needs two communities, splitting a
/// community of size at least 4.
pub fn plant_event<R: Rng>(
    membership: &mut BTreeMap<VertexId, CommunityId>,
    kind: PlantedEvent,
    rng: &mut R,
) -> bool {
    let groups = group_members(membership);
    match kind {
        PlantedEvent::Merge => {
            if groups.len() < 2 {
                log::info!("merge skipped: fewer than two communities");
                return false;
            }
            let ids: Vec<CommunityId> = groups.keys().copied().collect();
            let i = rng.gen_range(0..ids.len());
            let mut j = rng.gen_range(0..ids.len() - 1);
            if j >= i {
                j += 1;
            }
            let target = ids[i].min(ids[j]);
            for &c in [ids[i], ids[j]].iter() {
                for &v in &groups[&c] {
                    membership.insert(v, target);
                }
            }
            true
        }
        PlantedEvent::Split => {
            let eligible: Vec<CommunityId> =
                groups.iter().filter(|(_, m)| m.len() >= 4).map(|(&c, _)| c).collect();
            let Some(&c) = pick(&eligible, rng) else {
                log::info!("split skipped: no community of size 4 or more");
                return false;
            };
            let members = &groups[&c];
            let mut order: Vec<VertexId> = members.clone();
            // Fisher-Yates over the sorted member list.
            for i in (1..order.len()).rev() {
                order.swap(i, rng.gen_range(0..=i));
            }
            let (left, right) = order.split_at(order.len() / 2);
            for half in [left, right] {
                let id = *half.iter().min().expect("halves are nonempty");
                for &v in half {
                    membership.insert(v, id);
                }
            }
            true
        }
    }
}

/// Generates the event stream and ground-truth timeline for `cfg`.
pub fn generate(cfg: &GenConfig) -> Result<GroundTruthTimeline> {
    cfg.validate()?;
    let n = cfg.n_vertices;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let sizes = sample_sizes(&mut rng, n, cfg.size_exponent);
    let mut membership: BTreeMap<VertexId, CommunityId> = BTreeMap::new();
    let mut first = 0u64;
    for &s in &sizes {
        for v in first..first + s as u64 {
            membership.insert(v, first);
        }
        first += s as u64;
    }
    let mut targets = degree_targets(cfg, &membership, &mut rng);

    let mut live: BTreeMap<(VertexId, VertexId), Timestamp> = BTreeMap::new();
    let mut degree: BTreeMap<VertexId, usize> = (0..n as u64).map(|v| (v, 0)).collect();
    let mut events = Vec::new();
    let mut stable_points: Vec<(u64, BTreeMap<VertexId, CommunityId>)> = Vec::new();

    for it in 0..cfg.iterations {
        let groups = group_members(&membership);
        for v in 0..n as u64 {
            let deficit = targets[&v].saturating_sub(degree[&v]);
            for _ in 0..deficit {
                let partner = if rng.gen::<f64>() < cfg.intra_probability {
                    intra_partner(&groups[&membership[&v]], v, &mut rng)
                } else if rng.gen::<f64>() < cfg.inter_probability {
                    inter_partner(n as u64, &groups[&membership[&v]], &mut rng)
                } else {
                    None
                };
                let Some(p) = partner else { continue };
                let (a, b) = if v < p { (v, p) } else { (p, v) };
                events.push(EdgeEvent::Add { src: a, dst: b, weight: 1.0, time: it });
                if live.insert((a, b), it).is_none() {
                    *degree.get_mut(&a).unwrap() += 1;
                    *degree.get_mut(&b).unwrap() += 1;
                }
            }
        }

        let expired: Vec<(VertexId, VertexId)> = live
            .iter()
            .filter(|&(_, &refreshed)| refreshed + cfg.decay_ttl <= it)
            .map(|(&k, _)| k)
            .collect();
        for (a, b) in expired {
            live.remove(&(a, b));
            *degree.get_mut(&a).unwrap() -= 1;
            *degree.get_mut(&b).unwrap() -= 1;
            events.push(EdgeEvent::Remove { src: a, dst: b, time: it });
        }

        let threshold = cfg.intra_probability / 2.0;
        let stable = groups.values().all(|m| live_density(m, &live) >= threshold);
        if stable {
            stable_points.push((it, membership.clone()));
            if rng.gen::<f64>() < cfg.event_probability {
                let kind =
                    if rng.gen::<f64>() < 0.5 { PlantedEvent::Merge } else { PlantedEvent::Split };
                if plant_event(&mut membership, kind, &mut rng) {
                    raise_targets(&membership, &mut targets);
                }
            }
        }
    }

    Ok(GroundTruthTimeline { events, stable_points })
}

/// Discrete power-law sampler over `[min, max]` with `P(k) ∝ k^-exponent`.
pub(crate) struct PowerLaw {
    min: u64,
    cumulative: Vec<f64>,
}

impl PowerLaw {
    pub(crate) fn new(min: u64, max: u64, exponent: f64) -> Self {
        let mut cumulative = Vec::with_capacity((max - min + 1) as usize);
        let mut acc = 0.0;
        for k in min..=max {
            acc += (k as f64).powf(-exponent);
            cumulative.push(acc);
        }
        PowerLaw { min, cumulative }
    }

    pub(crate) fn sample<R: Rng>(&self, rng: &mut R) -> u64 {
        let total = *self.cumulative.last().expect("nonempty support");
        let u = rng.gen::<f64>() * total;
        let idx = self.cumulative.partition_point(|&c| c < u);
        self.min + idx.min(self.cumulative.len() - 1) as u64
    }
}

/// Community sizes: power-law draws in `[3, max(3, n/3)]`, trimmed and
/// topped up so they sum to exactly `n` (remainder to the largest).
fn sample_sizes<R: Rng>(rng: &mut R, n: usize, exponent: f64) -> Vec<usize> {
    let law = PowerLaw::new(MIN_COMMUNITY as u64, (n / 3).max(MIN_COMMUNITY) as u64, exponent);
    let mut sizes: Vec<usize> = Vec::new();
    let mut sum = 0usize;
    while sum < n {
        let s = law.sample(rng) as usize;
        sizes.push(s);
        sum += s;
    }
    let overshoot = sum - n;
    if overshoot > 0 {
        let last = *sizes.last().expect("at least one draw");
        if last - overshoot >= MIN_COMMUNITY {
            *sizes.last_mut().unwrap() -= overshoot;
        } else {
            sizes.pop();
            let deficit = n - (sum - last);
            let largest = sizes
                .iter()
                .enumerate()
                .max_by_key(|&(i, &s)| (s, std::cmp::Reverse(i)))
                .map(|(i, _)| i)
                .expect("sizes nonempty after pop");
            sizes[largest] += deficit;
        }
    }
    sizes
}

/// Per-vertex degree targets: the heavy-tailed draw, floored so community
/// members can reach the stability density.
fn degree_targets<R: Rng>(
    cfg: &GenConfig,
    membership: &BTreeMap<VertexId, CommunityId>,
    rng: &mut R,
) -> BTreeMap<VertexId, usize> {
    let kmax = ((cfg.n_vertices as f64).sqrt().floor() as u64).max(2);
    let law = PowerLaw::new(2, kmax, cfg.degree_exponent);
    let groups = group_members(membership);
    let mut targets = BTreeMap::new();
    for (&v, &c) in membership {
        let drawn = law.sample(rng) as usize;
        let floor = (TARGET_FLOOR * (groups[&c].len() - 1) as f64).ceil() as usize;
        targets.insert(v, drawn.max(floor));
    }
    targets
}

/// Raises degree targets after a planted event so changed communities can
/// re-densify; targets never shrink.
fn raise_targets(
    membership: &BTreeMap<VertexId, CommunityId>,
    targets: &mut BTreeMap<VertexId, usize>,
) {
    let groups = group_members(membership);
    for members in groups.values() {
        let floor = (TARGET_FLOOR * (members.len() - 1) as f64).ceil() as usize;
        for &v in members {
            let t = targets.get_mut(&v).expect("targets cover all vertices");
            *t = (*t).max(floor);
        }
    }
}

/// Uniform member of `members` other than `v`; `None` for a singleton.
fn intra_partner<R: Rng>(members: &[VertexId], v: VertexId, rng: &mut R) -> Option<VertexId> {
    if members.len() < 2 {
        return None;
    }
    let pos = members.binary_search(&v).expect("v belongs to its community");
    let idx = rng.gen_range(0..members.len() - 1);
    Some(members[if idx >= pos { idx + 1 } else { idx }])
}

/// Uniform vertex outside `members`; `None` if the community spans all
/// vertices.
fn inter_partner<R: Rng>(n: u64, members: &[VertexId], rng: &mut R) -> Option<VertexId> {
    if members.len() as u64 >= n {
        return None;
    }
    let mut candidate = rng.gen_range(0..n - members.len() as u64);
    for &m in members {
        if m <= candidate {
            candidate += 1;
        } else {
            break;
        }
    }
    Some(candidate)
}

/// Unweighted density of `members` over the live-edge set.
fn live_density(members: &[VertexId], live: &BTreeMap<(VertexId, VertexId), Timestamp>) -> f64 {
    let s = members.len();
    if s < 2 {
        return 0.0;
    }
    let mut present = 0usize;
    for (i, &u) in members.iter().enumerate() {
        for &v in &members[i + 1..] {
            if live.contains_key(&(u, v)) {
                present += 1;
            }
        }
    }
    2.0 * present as f64 / (s as f64 * (s - 1) as f64)
}

fn group_members(membership: &BTreeMap<VertexId, CommunityId>) -> BTreeMap<CommunityId, Vec<VertexId>> {
    let mut groups: BTreeMap<CommunityId, Vec<VertexId>> = BTreeMap::new();
    for (&v, &c) in membership {
        groups.entry(c).or_default().push(v);
    }
    groups
}

fn pick<'a, T, R: Rng>(items: &'a [T], rng: &mut R) -> Option<&'a T> {
    if items.is_empty() {
        None
    } else {
        Some(&items[rng.gen_range(0..items.len())])
    }
}
