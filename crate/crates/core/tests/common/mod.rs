//! Shared builders and brute-force references for integration tests.
#![allow(dead_code)]

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sand_core::{
    assign_features, build_overlay, DeviceId, FeatureId, Latency, Network, OverlayMode,
    RelationLabel, TopologyKind,
};

/// Comm graph from an edge list (self-loops and duplicates skipped), every
/// comm edge mirrored into the overlay with a `Friend` label.
pub fn graph(n: usize, edges: &[(u32, u32)]) -> Network {
    let mut net = Network::new(TopologyKind::Fixture, 0, n);
    for &(u, v) in edges {
        let (u, v) = (DeviceId(u), DeviceId(v));
        if u != v && net.latency(u, v).is_none() {
            net.add_comm_edge(u, v, Latency::from_millis(1)).unwrap();
            net.add_social_edge(u, v, &[RelationLabel::Friend]).unwrap();
        }
    }
    net
}

/// Erdos-Renyi style instance with profiles and an overlay. Latencies are
/// all 1 ms when `equal_latency`, otherwise uniform in 1..=9 ms.
pub fn random_instance(seed: u64, max_n: usize, equal_latency: bool) -> Network {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_n);
    let p: f64 = rng.random_range(0.05..0.5);
    let mut net = Network::new(TopologyKind::Fixture, seed, n);
    for u in 0..n as u32 {
        for v in (u + 1)..n as u32 {
            if rng.random_bool(p) {
                let ms = if equal_latency {
                    1
                } else {
                    rng.random_range(1..=9)
                };
                net.add_comm_edge(DeviceId(u), DeviceId(v), Latency::from_millis(ms))
                    .unwrap();
            }
        }
    }
    let pool = rng.random_range(2..=8);
    let per = rng.random_range(1..=pool.min(3));
    assign_features(&mut net, pool, per, &mut rng).unwrap();
    let mode = if rng.random_bool(0.5) {
        OverlayMode::Literal
    } else {
        OverlayMode::Enriched
    };
    build_overlay(&mut net, mode);
    net
}

pub fn random_request(net: &Network, seed: u64) -> (DeviceId, FeatureId) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED);
    let s = DeviceId(rng.random_range(0..net.len() as u32));
    let f = FeatureId(rng.random_range(0..net.feature_pool()));
    (s, f)
}

/// Hop distances over the comm graph; `None` where unreachable.
pub fn comm_hops(net: &Network, src: DeviceId) -> Vec<Option<u32>> {
    let mut dist = vec![None; net.len()];
    dist[src.index()] = Some(0);
    let mut queue = VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u.index()].unwrap();
        for l in net.comm_neighbors(u) {
            if dist[l.to.index()].is_none() {
                dist[l.to.index()] = Some(du + 1);
                queue.push_back(l.to);
            }
        }
    }
    dist
}

/// Minimum comm-graph hop distance from `src` to any holder of `f`.
pub fn nearest_holder_hops(net: &Network, src: DeviceId, f: FeatureId) -> Option<u32> {
    let dist = comm_hops(net, src);
    net.devices()
        .filter(|&d| net.holds(d, f))
        .filter_map(|d| dist[d.index()])
        .min()
}

/// Devices reachable from `src` over social edges.
pub fn overlay_reachable(net: &Network, src: DeviceId) -> Vec<bool> {
    let mut seen = vec![false; net.len()];
    seen[src.index()] = true;
    let mut stack = vec![src];
    while let Some(u) = stack.pop() {
        for e in net.social_neighbors(u) {
            if !seen[e.to.index()] {
                seen[e.to.index()] = true;
                stack.push(e.to);
            }
        }
    }
    seen
}

pub fn holder_reachable_in_overlay(net: &Network, src: DeviceId, f: FeatureId) -> bool {
    let seen = overlay_reachable(net, src);
    net.devices().any(|d| seen[d.index()] && net.holds(d, f))
}
