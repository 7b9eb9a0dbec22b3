//! Acceptance gate: one test per numbered criterion (c01..c10). Each test
//! prints its measurements, so the per-test pass/fail line doubles as the
//! criterion report.
//!
//! Two assertions are known not to hold for this design and fail with
//! diagnostics instead of being weakened: the per-step quality floor in
//! c05 (a merge-only incremental optimizer cannot always re-split after
//! removals or early merges) and the global density monotonicity in c08
//! (splitting one community can dilute the average when the new parts sit
//! below the overall mean, even though each split improves its own
//! community). The sibling c08 checks cover the sound parts.

use commstream::densopt::{adc, optimize_density};
use commstream::dynlouvain::DynLouvain;
use commstream::generator::{generate, GenConfig};
use commstream::graph::{CommunityId, DynGraph, VertexId};
use commstream::louvain::{aggregate, louvain_full, modularity, move_gain, one_level, Partition};
use commstream::metrics::{partition_similarity, stability};
use commstream::temporal::{
    expand_time_ordered, temporal_shortest_path, EdgeEvent, SnapshotSequence,
};
use commstream::window::{Window, WindowMode, WindowPolicy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

/// The 7-vertex example network: triangle {1,2,3} and loop {4,5,6,7}
/// joined by the (3,5) bridge.
fn example_network() -> DynGraph {
    let mut g = DynGraph::new();
    for (u, v) in [(1, 2), (1, 3), (2, 3), (3, 5), (4, 5), (4, 7), (5, 6), (6, 7)] {
        g.add_edge(u, v, 1.0).unwrap();
    }
    g
}

fn groups_of(mapping: &BTreeMap<VertexId, CommunityId>) -> BTreeMap<CommunityId, BTreeSet<VertexId>> {
    let mut groups: BTreeMap<CommunityId, BTreeSet<VertexId>> = BTreeMap::new();
    for (&v, &c) in mapping {
        groups.entry(c).or_default().insert(v);
    }
    groups
}

fn random_graph(rng: &mut ChaCha8Rng, max_vertices: u64, edges: usize) -> DynGraph {
    let n = rng.gen_range(4..=max_vertices);
    let mut g = DynGraph::new();
    for _ in 0..edges {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        let w = rng.gen_range(1..=4) as f64;
        g.add_edge(u, v, w).unwrap();
    }
    g
}

/// Random mapping whose labels are drawn from the vertex ids.
fn random_partition(g: &DynGraph, rng: &mut ChaCha8Rng) -> Partition {
    let ids: Vec<VertexId> = g.vertices().collect();
    let mapping: BTreeMap<VertexId, CommunityId> =
        ids.iter().map(|&v| (v, ids[rng.gen_range(0..ids.len())])).collect();
    Partition::from_mapping(g, &mapping).unwrap()
}

/// Random partition into at most k communities, uniform label per vertex.
fn random_k_partition(g: &DynGraph, k: u64, rng: &mut ChaCha8Rng) -> Partition {
    let mapping: BTreeMap<VertexId, CommunityId> =
        g.vertices().map(|v| (v, rng.gen_range(0..k))).collect();
    Partition::from_mapping(g, &mapping).unwrap()
}

/// Modularity from first principles, ignoring every cache.
fn modularity_oracle(g: &DynGraph, p: &Partition) -> f64 {
    let two_m: f64 = g.vertices().map(|v| g.weighted_degree(v).unwrap()).sum();
    let mut sums: BTreeMap<CommunityId, (f64, f64)> = BTreeMap::new();
    for v in g.vertices() {
        let c = p.community_of(v).unwrap();
        let entry = sums.entry(c).or_insert((0.0, 0.0));
        entry.1 += g.weighted_degree(v).unwrap();
        for (u, w) in g.neighbors(v).unwrap() {
            if u == v {
                entry.0 += 2.0 * w;
            } else if p.community_of(u).unwrap() == c {
                entry.0 += w;
            }
        }
    }
    sums.values().map(|&(inside, tot)| inside / two_m - (tot / two_m).powi(2)).sum()
}

#[test]
fn c01_static_pipeline_matches_goldens() {
    let started = Instant::now();
    let g = example_network();

    let mut p = Partition::singletons(&g);
    assert!(one_level(&g, &mut p).unwrap());
    p.canonicalize();
    let first: Vec<(CommunityId, Vec<VertexId>)> = groups_of(&p.mapping())
        .into_iter()
        .map(|(c, m)| (c, m.into_iter().collect()))
        .collect();
    assert_eq!(first, vec![(1, vec![1, 2, 3]), (4, vec![4, 5]), (6, vec![6, 7])]);

    let agg = aggregate(&g, &p).unwrap();
    let loops: Vec<f64> = agg.vertices().map(|v| 2.0 * agg.self_loop(v)).collect();
    assert_eq!(loops, vec![6.0, 2.0, 2.0]);
    assert_eq!(agg.edge_weight(1, 4), Some(1.0));
    assert_eq!(agg.edge_weight(4, 6), Some(2.0));
    assert_eq!(agg.edge_weight(1, 6), None);

    let result = louvain_full(&g).unwrap();
    let final_groups: Vec<(CommunityId, Vec<VertexId>)> = groups_of(&result.partition.canonical_mapping())
        .into_iter()
        .map(|(c, m)| (c, m.into_iter().collect()))
        .collect();
    assert_eq!(final_groups, vec![(1, vec![1, 2, 3]), (4, vec![4, 5, 6, 7])]);

    let mut final_p = result.partition;
    final_p.canonicalize();
    let agg2 = aggregate(&g, &final_p).unwrap();
    let loops2: Vec<f64> = agg2.vertices().map(|v| 2.0 * agg2.self_loop(v)).collect();
    assert_eq!(loops2, vec![6.0, 8.0]);
    assert_eq!(agg2.edge_weight(1, 4), Some(1.0));
    assert_eq!(modularity(&g, &final_p).unwrap(), 0.3671875);

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!("c01: goldens exact, {elapsed:?}");
}

#[test]
fn c02_single_addition_reconverges_to_golden() {
    let golden: BTreeMap<VertexId, CommunityId> =
        [(1, 1), (2, 1), (3, 1), (4, 4), (5, 4), (6, 4), (7, 4)].into();
    let mut state = DynLouvain::with_mapping(example_network(), &golden).unwrap();

    let affected = state.affected_by_addition(1, 4).unwrap();
    assert_eq!(affected.communities, BTreeSet::from([1, 4]));
    assert_eq!(affected.vertices, (1..=7).collect());

    let report = state.step(&EdgeEvent::Add { src: 1, dst: 4, weight: 1.0, time: 0 }).unwrap();
    assert_eq!(state.community_mapping(), golden);

    let ul = state.ul_graph();
    assert_eq!(ul.vertex_count(), 2);
    assert_eq!(2.0 * ul.self_loop(1), 6.0);
    assert_eq!(2.0 * ul.self_loop(4), 8.0);
    assert_eq!(ul.edge_weight(1, 4), Some(2.0));
    println!("c02: disband {{1,4}} then reconverge, Q {} -> {}", state.previous_modularity(), report.modularity);
}

#[test]
fn c03_modularity_and_gain_match_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    let mut max_q_err = 0.0f64;
    let mut max_gain_err = 0.0f64;
    for _ in 0..100 {
        let g = random_graph(&mut rng, 30, 45);
        let mut p = random_partition(&g, &mut rng);
        let fast = modularity(&g, &p).unwrap();
        let slow = modularity_oracle(&g, &p);
        max_q_err = max_q_err.max((fast - slow).abs());

        let ids: Vec<VertexId> = g.vertices().collect();
        let v = ids[rng.gen_range(0..ids.len())];
        let targets: Vec<CommunityId> = p.communities().collect();
        let target = targets[rng.gen_range(0..targets.len())];
        let gain = move_gain(&g, &p, v, target).unwrap();
        let before = modularity(&g, &p).unwrap();
        p.move_vertex(&g, v, target).unwrap();
        let after = modularity(&g, &p).unwrap();
        max_gain_err = max_gain_err.max((after - before - gain).abs());
    }
    println!("c03: max |Q - oracle| {max_q_err:.3e}, max |gain - delta| {max_gain_err:.3e}");
    assert!(max_q_err <= 1e-10);
    assert!(max_gain_err <= 1e-10);
}

#[test]
fn c04_upper_level_equals_fresh_aggregation_after_every_step() {
    for seed in 0..4u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(40 + seed);
        let mut state = DynLouvain::new(DynGraph::new()).unwrap();
        let mut live: Vec<(VertexId, VertexId)> = Vec::new();
        for t in 0..500u64 {
            let event = if !live.is_empty() && rng.gen_bool(0.25) {
                let (src, dst) = live.swap_remove(rng.gen_range(0..live.len()));
                EdgeEvent::Remove { src, dst, time: t }
            } else {
                let src = rng.gen_range(0..40);
                let dst = rng.gen_range(0..40);
                let weight = rng.gen_range(1..=3) as f64;
                if !state.graph().has_edge(src, dst) {
                    live.push((src, dst));
                }
                EdgeEvent::Add { src, dst, weight, time: t }
            };
            state.step(&event).unwrap();
            let rebuilt = aggregate(state.graph(), state.partition()).unwrap();
            assert_eq!(state.ul_graph(), &rebuilt, "divergence at seed {seed}, step {t}");
        }
    }
    println!("c04: upper level exact across 4 x 500 events");
}

#[test]
fn c05_per_step_quality_stays_within_five_percent_of_static() {
    let mut breaches: Vec<(u64, u64, f64, f64)> = Vec::new();
    let mut steps_total = 0u64;
    let mut worst_ratio = f64::INFINITY;
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(500 + seed);
        let n = rng.gen_range(8..=30);
        let adds = rng.gen_range(20..=60);
        let mut state = DynLouvain::new(DynGraph::new()).unwrap();
        for t in 0..adds {
            let src = rng.gen_range(0..n);
            let dst = rng.gen_range(0..n);
            state.step(&EdgeEvent::Add { src, dst, weight: 1.0, time: t }).unwrap();
            steps_total += 1;
            let statics = louvain_full(state.graph()).unwrap();
            let static_q = modularity(state.graph(), &statics.partition).unwrap();
            let dyn_q = state.last_modularity();
            if static_q > 0.0 {
                worst_ratio = worst_ratio.min(dyn_q / static_q);
            }
            if dyn_q < 0.95 * static_q - 1e-12 {
                breaches.push((seed, t, dyn_q, static_q));
            }
        }
    }
    println!(
        "c05: {} breaches over {} steps, worst dyn/static ratio {:.4}; first breaches: {:?}",
        breaches.len(),
        steps_total,
        worst_ratio,
        &breaches[..breaches.len().min(5)]
    );
    assert!(
        breaches.is_empty(),
        "incremental quality fell below 0.95 x static on {} of {} steps",
        breaches.len(),
        steps_total
    );
}

#[test]
fn c06_incremental_is_no_less_stable_than_rerun() {
    let mut dyn_changes = Vec::new();
    let mut rerun_changes = Vec::new();
    for seed in 0..10u64 {
        let cfg = GenConfig {
            n_vertices: 200,
            degree_exponent: 2.5,
            size_exponent: 3.5,
            intra_probability: 0.8,
            inter_probability: 0.05,
            decay_ttl: 3,
            event_probability: 0.25,
            iterations: 3,
            seed: 600 + seed,
        };
        let timeline = generate(&cfg).unwrap();
        let mut state = DynLouvain::new(DynGraph::new()).unwrap();
        let mut graph = DynGraph::new();
        let mut rerun_prev: BTreeMap<VertexId, CommunityId> = BTreeMap::new();
        for event in &timeline.events {
            let dyn_prev = state.community_mapping();
            state.step(event).unwrap();
            dyn_changes.push(stability(&dyn_prev, &state.community_mapping()));

            match *event {
                EdgeEvent::Add { src, dst, weight, .. } => graph.add_edge(src, dst, weight).unwrap(),
                EdgeEvent::Remove { src, dst, .. } => {
                    graph.remove_edge(src, dst).unwrap();
                }
            }
            let mut p = louvain_full(&graph).unwrap().partition;
            p.canonicalize();
            let mapping = p.mapping().clone();
            rerun_changes.push(stability(&rerun_prev, &mapping));
            rerun_prev = mapping;
        }
    }
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    let dyn_mean = mean(&dyn_changes);
    let rerun_mean = mean(&rerun_changes);
    println!(
        "c06: mean per-step change, incremental {dyn_mean:.5} vs rerun {rerun_mean:.5} over {} steps",
        dyn_changes.len()
    );
    assert!(dyn_mean <= rerun_mean + 1e-12);
}

#[test]
fn c07_windowed_graph_equals_rebuild_from_contents() {
    let policies = [
        ("landmark", WindowPolicy::Landmark),
        ("sliding-count", WindowPolicy::Sliding { length: 200, mode: WindowMode::Count, stride: 1 }),
        ("sliding-time", WindowPolicy::Sliding { length: 40, mode: WindowMode::Time, stride: 1 }),
        ("overlapping", WindowPolicy::Sliding { length: 200, mode: WindowMode::Count, stride: 5 }),
    ];
    for (name, policy) in policies {
        let mut rng = ChaCha8Rng::seed_from_u64(70);
        let mut window = Window::new(policy).unwrap();
        let mut incremental: BTreeMap<(VertexId, VertexId), f64> = BTreeMap::new();
        let mut live: Vec<(VertexId, VertexId)> = Vec::new();
        let mut t = 0u64;
        for _ in 0..1000 {
            t += rng.gen_range(0..2);
            let event = if !live.is_empty() && rng.gen_bool(0.2) {
                let (src, dst) = live.swap_remove(rng.gen_range(0..live.len()));
                EdgeEvent::Remove { src, dst, time: t }
            } else {
                let src = rng.gen_range(0..60);
                let dst = rng.gen_range(0..60);
                if !live.contains(&(src, dst)) {
                    live.push((src, dst));
                }
                EdgeEvent::Add { src, dst, weight: rng.gen_range(1..=3) as f64, time: t }
            };
            for edit in window.advance(&event).unwrap() {
                match edit {
                    EdgeEvent::Add { src, dst, weight, .. } => {
                        incremental.insert((src.min(dst), src.max(dst)), weight);
                    }
                    EdgeEvent::Remove { src, dst, .. } => {
                        // Pass-through removals of evicted edges are no-ops.
                        incremental.remove(&(src.min(dst), src.max(dst)));
                    }
                }
            }
            let rebuilt: BTreeMap<(VertexId, VertexId), f64> = window
                .contents()
                .map(|e| ((e.src.min(e.dst), e.src.max(e.dst)), e.weight))
                .collect();
            assert_eq!(incremental, rebuilt, "policy {name} diverged at t={t}");
        }
    }
    println!("c07: incremental graph exact for all four window policies");
}

#[test]
fn c08_density_never_decreases_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(80);
    let mut breaches = Vec::new();
    for case in 0..200 {
        let g = random_graph(&mut rng, 16, 14);
        let k = rng.gen_range(2..=4);
        let p = random_k_partition(&g, k, &mut rng);
        let (_, report) = optimize_density(&g, &p).unwrap();
        if report.adc_after < report.adc_before - 1e-12 {
            breaches.push((case, report.adc_before, report.adc_after, report.splits.clone()));
        }
    }
    println!(
        "c08: {} of 200 random pairs lowered the average density; first: {:?}",
        breaches.len(),
        breaches.first()
    );
    assert!(
        breaches.is_empty(),
        "average density dropped on {} of 200 pairs (per-community improvements can dilute the mean)",
        breaches.len()
    );
}

#[test]
fn c08_disjoint_triangles_split_to_full_density() {
    let mut g = DynGraph::new();
    for (u, v) in [(1, 2), (1, 3), (2, 3), (4, 5), (4, 6), (5, 6)] {
        g.add_edge(u, v, 1.0).unwrap();
    }
    let one: BTreeMap<VertexId, CommunityId> = (1..=6).map(|v| (v, 1)).collect();
    let p = Partition::from_mapping(&g, &one).unwrap();
    let (refined, report) = optimize_density(&g, &p).unwrap();
    assert_eq!(report.adc_before, 0.4);
    assert_eq!(report.adc_after, 1.0);
    assert_eq!(report.splits, vec![(1, vec![1, 4])]);
    assert_eq!(
        groups_of(&refined.canonical_mapping()),
        BTreeMap::from([(1, BTreeSet::from([1, 2, 3])), (4, BTreeSet::from([4, 5, 6]))])
    );
    println!("c08: disjoint triangles split, density 0.4 -> 1.0");
}

#[test]
fn c08_refinement_is_idempotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(81);
    for case in 0..200 {
        let g = random_graph(&mut rng, 16, 14);
        let p = if case % 2 == 0 {
            random_partition(&g, &mut rng)
        } else {
            let k = rng.gen_range(2..=4);
            random_k_partition(&g, k, &mut rng)
        };
        let (once, _) = optimize_density(&g, &p).unwrap();
        let (twice, second) = optimize_density(&g, &once).unwrap();
        assert!(second.splits.is_empty());
        assert_eq!(once.canonical_mapping(), twice.canonical_mapping());
    }
    println!("c08: second refinement pass is always a no-op");
}

#[test]
fn c09_temporal_golden_and_exhaustive_oracle() {
    // Four vertices A=1, B=2, C=3, D=4 over three snapshots.
    let mut seq = SnapshotSequence::new(BTreeSet::from([1, 2, 3, 4]));
    seq.push(1, vec![(1, 3)]).unwrap();
    seq.push(2, vec![(1, 4)]).unwrap();
    seq.push(3, vec![(4, 2)]).unwrap();
    let g = expand_time_ordered(&seq, 0, 3).unwrap();
    let path = temporal_shortest_path(&g, 1, 2).unwrap().unwrap();
    assert_eq!(path, vec![(1, 0), (1, 1), (4, 2), (2, 3)]);

    // All time-respecting walks by brute force on random small instances.
    fn all_walk_arrival(
        seq: &SnapshotSequence,
        at: (VertexId, u64),
        dst: VertexId,
        t_end: u64,
    ) -> Option<u64> {
        if at.0 == dst {
            return Some(at.1);
        }
        if at.1 == t_end {
            return None;
        }
        let next_t = at.1 + 1;
        let mut best: Option<u64> = None;
        let mut consider = |v: VertexId| {
            if let Some(t) = all_walk_arrival(seq, (v, next_t), dst, t_end) {
                best = Some(best.map_or(t, |b: u64| b.min(t)));
            }
        };
        consider(at.0);
        if let Some(snap) = seq.snapshot_at(next_t) {
            for &(a, b) in snap {
                if a == at.0 {
                    consider(b);
                } else if b == at.0 {
                    consider(a);
                }
            }
        }
        best
    }

    let mut rng = ChaCha8Rng::seed_from_u64(90);
    let mut reachable = 0;
    for _ in 0..300 {
        let n = rng.gen_range(2..=5u64);
        let steps = rng.gen_range(1..=5u64);
        let universe: BTreeSet<VertexId> = (0..n).collect();
        let mut seq = SnapshotSequence::new(universe);
        for t in 1..=steps {
            let mut snap = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.25) {
                        snap.push((u, v));
                    }
                }
            }
            seq.push(t, snap).unwrap();
        }
        let src = rng.gen_range(0..n);
        let dst = rng.gen_range(0..n);
        let g = expand_time_ordered(&seq, 0, steps).unwrap();
        let found = temporal_shortest_path(&g, src, dst).unwrap();
        let oracle = all_walk_arrival(&seq, (src, 0), dst, steps);
        match (&found, oracle) {
            (Some(path), Some(t)) => {
                assert_eq!(path.last().unwrap().1, t, "arrival mismatch");
                reachable += 1;
            }
            (None, None) => {}
            other => panic!("search {:?} vs oracle {:?}", other.0, other.1),
        }
    }
    println!("c09: golden path exact; 300 random instances agree with brute force ({reachable} reachable)");
}

#[test]
fn c10_generator_is_reproducible_and_recoverable() {
    let cfg = GenConfig {
        n_vertices: 200,
        degree_exponent: 2.5,
        size_exponent: 2.5,
        intra_probability: 0.8,
        inter_probability: 0.05,
        decay_ttl: 5,
        event_probability: 0.2,
        iterations: 12,
        seed: 7,
    };
    let a = generate(&cfg).unwrap();
    let b = generate(&cfg).unwrap();
    assert_eq!(a, b);
    // Byte-level reproducibility of the serialized stream.
    let serialize = |tl: &commstream::generator::GroundTruthTimeline| -> String {
        tl.events
            .iter()
            .map(|e| match *e {
                EdgeEvent::Add { src, dst, weight, time } => format!("+,{src},{dst},{weight},{time}\n"),
                EdgeEvent::Remove { src, dst, time } => format!("-,{src},{dst},,{time}\n"),
            })
            .collect()
    };
    assert_eq!(serialize(&a), serialize(&b));
    assert!(!a.stable_points.is_empty(), "no stable iteration reached");

    // Replay once; at each stable point check both that the planted
    // partition scores well on the active graph and that the incremental
    // pipeline's answer resembles it.
    let mut state = DynLouvain::new(DynGraph::new()).unwrap();
    let mut event_idx = 0;
    let mut min_q = f64::INFINITY;
    let mut min_nmi = f64::INFINITY;
    for (iteration, truth) in &a.stable_points {
        while event_idx < a.events.len() && a.events[event_idx].time() <= *iteration {
            state.step(&a.events[event_idx]).unwrap();
            event_idx += 1;
        }
        let graph = state.graph();
        let active: BTreeMap<VertexId, CommunityId> = truth
            .iter()
            .filter(|(v, _)| graph.contains_vertex(**v))
            .map(|(&v, &c)| (v, c))
            .collect();
        let p = Partition::from_mapping(graph, &active).unwrap();
        min_q = min_q.min(modularity(graph, &p).unwrap());

        let found = state.community_mapping();
        let shared: BTreeSet<VertexId> =
            found.keys().filter(|v| active.contains_key(v)).copied().collect();
        let found_shared: BTreeMap<VertexId, CommunityId> =
            shared.iter().map(|&v| (v, found[&v])).collect();
        let truth_shared: BTreeMap<VertexId, CommunityId> =
            shared.iter().map(|&v| (v, active[&v])).collect();
        min_nmi = min_nmi.min(partition_similarity(&found_shared, &truth_shared).unwrap());
    }
    println!(
        "c10: {} events, {} stable points, min planted Q {min_q:.4}, min NMI {min_nmi:.4}",
        a.events.len(),
        a.stable_points.len()
    );
    assert!(min_q > 0.3, "planted modularity bottomed out at {min_q}");
    assert!(min_nmi > 0.5, "similarity to planted communities bottomed out at {min_nmi}");
}
