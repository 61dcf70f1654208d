//! Discovery schemes.
//!
//! - [`sand_discover`]: depth-first search over the social overlay, visiting
//!   children in descending rank order, with a depth limit and a TTL budget
//!   charged on every link crossing (forward and backtrack).
//! - [`broadcast_discover`]: flooding over the communication graph, modeled
//!   as earliest-arrival times.
//! - [`centralized_discover`]: a global registry that returns the min-hop
//!   path to the nearest holder.
//!
//! All three are pure functions of the network, the rank table and the
//! request.

use alloc::collections::{BinaryHeap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};
use core::fmt;

use crate::ids::{DeviceId, FeatureId, SimTime};
use crate::network::Network;
use crate::ranking::RankTable;

pub const DEFAULT_TTL: SimTime = SimTime::from_millis(60_000);
pub const DEFAULT_DEPTH_LIMIT: u32 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiscoveryRequest {
    pub source: DeviceId,
    pub feature: FeatureId,
    pub ttl: SimTime,
    /// Maximum hop length of the search path.
    pub depth_limit: u32,
}

impl DiscoveryRequest {
    pub fn new(source: DeviceId, feature: FeatureId) -> Self {
        DiscoveryRequest {
            source,
            feature,
            ttl: DEFAULT_TTL,
            depth_limit: DEFAULT_DEPTH_LIMIT,
        }
    }

    pub fn with_ttl(mut self, ttl: SimTime) -> Self {
        self.ttl = ttl;
        self
    }

    pub fn with_depth_limit(mut self, depth_limit: u32) -> Self {
        self.depth_limit = depth_limit;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureReason {
    TtlExpired,
    Exhausted,
    NoSuchFeature,
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailureReason::TtlExpired => "ttl-expired",
            FailureReason::Exhausted => "exhausted",
            FailureReason::NoSuchFeature => "no-such-feature",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscoveryOutcome {
    /// Source to target on success; empty on failure.
    pub path: Vec<DeviceId>,
    pub hops: u32,
    /// Distinct devices that received the request, source and target included.
    pub contacted: u32,
    pub elapsed: SimTime,
    pub failure: Option<FailureReason>,
}

impl DiscoveryOutcome {
    fn found(path: Vec<DeviceId>, contacted: u32, elapsed: SimTime) -> Self {
        DiscoveryOutcome {
            hops: path.len() as u32 - 1,
            path,
            contacted,
            elapsed,
            failure: None,
        }
    }

    fn failed(reason: FailureReason, contacted: u32, elapsed: SimTime) -> Self {
        DiscoveryOutcome {
            path: Vec::new(),
            hops: 0,
            contacted,
            elapsed,
            failure: Some(reason),
        }
    }

    pub fn success(&self) -> bool {
        self.failure.is_none()
    }

    pub fn target(&self) -> Option<DeviceId> {
        self.path.last().copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceAction {
    Forward,
    Backtrack,
    Found,
}

impl fmt::Display for TraceAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TraceAction::Forward => "forward",
            TraceAction::Backtrack => "backtrack",
            TraceAction::Found => "found",
        })
    }
}

/// One move of the SAND search token.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceEvent {
    pub step: u32,
    pub from: DeviceId,
    pub to: DeviceId,
    pub action: TraceAction,
    /// Cumulative elapsed time after the move.
    pub elapsed: SimTime,
}

/// Unvisited social neighbors of `i`, by descending rank, then descending
/// degree, then descending diversity, then ascending id.
pub fn order_neighbors<V>(
    net: &Network,
    ranks: &RankTable,
    i: DeviceId,
    visited: V,
) -> Vec<DeviceId>
where
    V: Fn(DeviceId) -> bool,
{
    let mut out: Vec<DeviceId> = net
        .social_neighbors(i)
        .iter()
        .map(|e| e.to)
        .filter(|&d| !visited(d))
        .collect();
    out.sort_by(|&x, &y| preference(ranks, x, y));
    out
}

fn preference(ranks: &RankTable, x: DeviceId, y: DeviceId) -> Ordering {
    let (a, b) = (ranks.entry(x), ranks.entry(y));
    b.rank
        .total_cmp(&a.rank)
        .then(b.k.cmp(&a.k))
        .then(b.d.cmp(&a.d))
        .then(x.cmp(&y))
}

pub fn sand_discover(net: &Network, ranks: &RankTable, req: &DiscoveryRequest) -> DiscoveryOutcome {
    sand_discover_traced(net, ranks, req, |_| {})
}

struct Frame {
    device: DeviceId,
    children: Vec<DeviceId>,
    next: usize,
}

/// [`sand_discover`] reporting every token move to `trace`.
pub fn sand_discover_traced<T>(
    net: &Network,
    ranks: &RankTable,
    req: &DiscoveryRequest,
    mut trace: T,
) -> DiscoveryOutcome
where
    T: FnMut(TraceEvent),
{
    let mut visited = vec![false; net.len()];
    let mut contacted = 1u32;
    let mut elapsed = SimTime::ZERO;
    let mut step = 0u32;
    let mut emit = |from, to, action, elapsed| {
        trace(TraceEvent {
            step,
            from,
            to,
            action,
            elapsed,
        });
        step += 1;
    };

    let src = req.source;
    visited[src.index()] = true;
    if net.holds(src, req.feature) {
        emit(src, src, TraceAction::Found, elapsed);
        return DiscoveryOutcome::found(vec![src], contacted, elapsed);
    }

    let expand = |d: DeviceId, visited: &[bool]| Frame {
        device: d,
        children: order_neighbors(net, ranks, d, |x| visited[x.index()]),
        next: 0,
    };
    let mut stack = vec![expand(src, &visited)];
    // the source sits at depth 0; a device at depth == depth_limit is
    // tested but never expanded
    let expands = |depth: usize| depth < req.depth_limit as usize;

    loop {
        let depth = stack.len() - 1;
        let top = stack.last_mut().expect("non-empty stack");
        let mut next = None;
        while top.next < top.children.len() {
            let c = top.children[top.next];
            top.next += 1;
            if !visited[c.index()] {
                next = Some(c);
                break;
            }
        }
        let here = top.device;

        match next {
            Some(child) => {
                let latency = net
                    .latency(here, child)
                    .expect("social edge over comm edge");
                let arrive = elapsed.after(latency);
                if arrive > req.ttl {
                    return DiscoveryOutcome::failed(FailureReason::TtlExpired, contacted, elapsed);
                }
                elapsed = arrive;
                visited[child.index()] = true;
                contacted += 1;
                emit(here, child, TraceAction::Forward, elapsed);

                if net.holds(child, req.feature) {
                    emit(child, child, TraceAction::Found, elapsed);
                    let mut path: Vec<DeviceId> = stack.iter().map(|f| f.device).collect();
                    path.push(child);
                    return DiscoveryOutcome::found(path, contacted, elapsed);
                }
                if expands(depth + 1) {
                    stack.push(expand(child, &visited));
                } else {
                    let back = elapsed.after(latency);
                    if back > req.ttl {
                        return DiscoveryOutcome::failed(
                            FailureReason::TtlExpired,
                            contacted,
                            elapsed,
                        );
                    }
                    elapsed = back;
                    emit(child, here, TraceAction::Backtrack, elapsed);
                }
            }
            None => {
                stack.pop();
                let Some(parent) = stack.last() else {
                    return DiscoveryOutcome::failed(FailureReason::Exhausted, contacted, elapsed);
                };
                let latency = net.latency(here, parent.device).expect("tree edge");
                let back = elapsed.after(latency);
                if back > req.ttl {
                    return DiscoveryOutcome::failed(FailureReason::TtlExpired, contacted, elapsed);
                }
                elapsed = back;
                emit(here, parent.device, TraceAction::Backtrack, elapsed);
            }
        }
    }
}

const NO_PRED: u32 = u32::MAX;

/// Flooding over the communication graph. Arrival time of every device is
/// its earliest-arrival (shortest-latency) time; the target is the
/// earliest-arriving holder, lowest id on ties. `contacted` counts devices
/// reached no later than the target.
pub fn broadcast_discover(net: &Network, req: &DiscoveryRequest) -> DiscoveryOutcome {
    let n = net.len();
    let mut arrival = vec![u64::MAX; n];
    let mut hops = vec![u32::MAX; n];
    let mut pred = vec![NO_PRED; n];
    let mut heap = BinaryHeap::new();

    let src = req.source;
    arrival[src.index()] = 0;
    hops[src.index()] = 0;
    heap.push(Reverse((0u64, src.0)));

    let mut settled = 0u32;
    let mut last = 0u64;
    let mut target: Option<(DeviceId, u64)> = None;

    while let Some(Reverse((t, u))) = heap.pop() {
        if t > arrival[u as usize] {
            continue;
        }
        if let Some((_, deadline)) = target {
            if t > deadline {
                break;
            }
        }
        if t > req.ttl.micros() {
            break;
        }
        settled += 1;
        last = t;
        let ud = DeviceId(u);
        if target.is_none() && net.holds(ud, req.feature) {
            target = Some((ud, t));
        }
        for link in net.comm_neighbors(ud) {
            let v = link.to.index();
            let nt = t.saturating_add(u64::from(link.latency.micros()));
            let nh = hops[u as usize] + 1;
            let better = nt < arrival[v] || (nt == arrival[v] && (nh, u) < (hops[v], pred[v]));
            if better {
                if nt < arrival[v] {
                    heap.push(Reverse((nt, link.to.0)));
                }
                arrival[v] = nt;
                hops[v] = nh;
                pred[v] = u;
            }
        }
    }

    match target {
        Some((t, at)) => {
            let mut path = vec![t];
            let mut cur = t;
            while cur != src {
                cur = DeviceId(pred[cur.index()]);
                path.push(cur);
            }
            path.reverse();
            DiscoveryOutcome::found(path, settled, SimTime::from_micros(at))
        }
        None => DiscoveryOutcome::failed(
            FailureReason::TtlExpired,
            settled,
            SimTime::from_micros(last),
        ),
    }
}

/// Registry lookup: nearest holder by hop count on the communication graph
/// (lowest id on ties), reached over a min-hop path.
pub fn centralized_discover(net: &Network, req: &DiscoveryRequest) -> DiscoveryOutcome {
    if !net.devices().any(|d| net.holds(d, req.feature)) {
        return DiscoveryOutcome::failed(FailureReason::NoSuchFeature, 1, SimTime::ZERO);
    }
    let n = net.len();
    let mut pred = vec![NO_PRED; n];
    let mut seen = vec![false; n];
    let src = req.source;
    seen[src.index()] = true;

    let mut level = vec![src];
    let mut target = None;
    while !level.is_empty() {
        if let Some(t) = level
            .iter()
            .copied()
            .filter(|&d| net.holds(d, req.feature))
            .min()
        {
            target = Some(t);
            break;
        }
        let mut next = Vec::new();
        for &u in &level {
            for link in net.comm_neighbors(u) {
                if !seen[link.to.index()] {
                    seen[link.to.index()] = true;
                    pred[link.to.index()] = u.0;
                    next.push(link.to);
                }
            }
        }
        level = next;
    }

    let Some(t) = target else {
        return DiscoveryOutcome::failed(FailureReason::Exhausted, 1, SimTime::ZERO);
    };
    let mut path = VecDeque::from([t]);
    let mut elapsed = SimTime::ZERO;
    let mut cur = t;
    while cur != src {
        let p = DeviceId(pred[cur.index()]);
        elapsed = elapsed.after(net.latency(p, cur).expect("bfs tree edge"));
        path.push_front(p);
        cur = p;
    }
    let path: Vec<DeviceId> = path.into();
    if elapsed > req.ttl {
        return DiscoveryOutcome::failed(FailureReason::TtlExpired, path.len() as u32, elapsed);
    }
    let contacted = path.len() as u32;
    DiscoveryOutcome::found(path, contacted, elapsed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture::{self, feature_of, A, B, C, D, E, F};
    use crate::ids::Latency;
    use crate::network::{RelationLabel, TopologyKind};
    use crate::ranking::build_rank_table;

    fn ids(v: &[DeviceId]) -> Vec<char> {
        v.iter().map(|&d| fixture::name(d)).collect()
    }

    #[test]
    fn order_neighbors_prefers_e_from_a() {
        let home = fixture::smart_home();
        let ranks = build_rank_table(&home);
        let visited = |d: DeviceId| d == D;
        assert_eq!(order_neighbors(&home, &ranks, A, visited), vec![E, C]);
        assert!(order_neighbors(&home, &ranks, F, |_| true).is_empty());
    }

    #[test]
    fn order_neighbors_tie_break_by_id() {
        // star: center 0, leaves 3, 1, 2 all have R = 0, k = 1, d = 1
        let mut net = Network::new(TopologyKind::Fixture, 0, 4);
        for leaf in [3, 1, 2] {
            net.add_comm_edge(DeviceId(0), DeviceId(leaf), Latency::from_millis(1))
                .unwrap();
            net.add_social_edge(DeviceId(0), DeviceId(leaf), &[RelationLabel::Friend])
                .unwrap();
        }
        let ranks = build_rank_table(&net);
        assert_eq!(
            order_neighbors(&net, &ranks, DeviceId(0), |_| false),
            vec![DeviceId(1), DeviceId(2), DeviceId(3)]
        );
    }

    #[test]
    fn sand_worked_example() {
        let home = fixture::smart_home();
        let ranks = build_rank_table(&home);
        let req = DiscoveryRequest::new(D, feature_of(C));
        let out = sand_discover(&home, &ranks, &req);
        assert!(out.success());
        assert_eq!(ids(&out.path), vec!['D', 'A', 'E', 'C']);
        assert_eq!(out.hops, 3);
        assert_eq!(out.contacted, 4);
        assert_eq!(out.elapsed, SimTime::from_millis(3));
    }

    #[test]
    fn sand_trace_records_moves() {
        let home = fixture::smart_home();
        let ranks = build_rank_table(&home);
        let req = DiscoveryRequest::new(D, feature_of(B));
        let mut events = Vec::new();
        let out = sand_discover_traced(&home, &ranks, &req, |e| events.push(e));
        assert!(out.success());
        // D -> A -> E -> C -> B
        assert_eq!(ids(&out.path), vec!['D', 'A', 'E', 'C', 'B']);
        let last = events.last().unwrap();
        assert_eq!(last.action, TraceAction::Found);
        assert_eq!(last.elapsed, out.elapsed);
        assert!(events.windows(2).all(|w| w[1].step == w[0].step + 1));
    }

    #[test]
    fn sand_source_holds_feature() {
        let home = fixture::smart_home();
        let ranks = build_rank_table(&home);
        let out = sand_discover(&home, &ranks, &DiscoveryRequest::new(D, feature_of(D)));
        assert_eq!(out.path, vec![D]);
        assert_eq!((out.hops, out.contacted), (0, 1));
        assert_eq!(out.elapsed, SimTime::ZERO);
    }

    #[test]
    fn sand_exhausts_without_holder() {
        let home = fixture::smart_home();
        let ranks = build_rank_table(&home);
        let req = DiscoveryRequest::new(D, FeatureId(99)).with_ttl(SimTime::INFINITE);
        let out = sand_discover(&home, &ranks, &req);
        assert_eq!(out.failure, Some(FailureReason::Exhausted));
        assert_eq!(out.contacted, 8);
        // depth-first tour crosses each of the 7 tree edges twice
        assert_eq!(out.elapsed, SimTime::from_millis(14));
    }

    #[test]
    fn sand_zero_ttl() {
        let home = fixture::smart_home();
        let ranks = build_rank_table(&home);
        let req = DiscoveryRequest::new(D, feature_of(C)).with_ttl(SimTime::ZERO);
        let out = sand_discover(&home, &ranks, &req);
        assert_eq!(out.failure, Some(FailureReason::TtlExpired));
        assert_eq!(out.contacted, 1);
    }

    #[test]
    fn sand_depth_limit_blocks_deep_target() {
        let home = fixture::smart_home();
        let ranks = build_rank_table(&home);
        let req = DiscoveryRequest::new(D, feature_of(C)).with_depth_limit(1);
        let out = sand_discover(&home, &ranks, &req);
        assert_eq!(out.failure, Some(FailureReason::Exhausted));
        assert_eq!(out.contacted, 2);
        // A reached with depth 2 is enough (D -> A -> C)
        let req = DiscoveryRequest::new(D, feature_of(C)).with_depth_limit(2);
        let out = sand_discover(&home, &ranks, &req);
        assert_eq!(ids(&out.path), vec!['D', 'A', 'C']);
    }

    #[test]
    fn sand_ttl_counts_backtracks() {
        // D A E C B, back to C, back to E, E G H, back to G, back to E, E F
        let home = fixture::smart_home();
        let ranks = build_rank_table(&home);
        let req = DiscoveryRequest::new(D, feature_of(F)).with_ttl(SimTime::INFINITE);
        let full = sand_discover(&home, &ranks, &req);
        assert_eq!(ids(&full.path), vec!['D', 'A', 'E', 'F']);
        assert_eq!(full.elapsed, SimTime::from_millis(11));
        assert_eq!(full.contacted, 8);

        let tight = req.with_ttl(SimTime::from_micros(full.elapsed.micros() - 1));
        let out = sand_discover(&home, &ranks, &tight);
        assert_eq!(out.failure, Some(FailureReason::TtlExpired));
        assert_eq!(out.elapsed, SimTime::from_millis(10));
    }

    #[test]
    fn broadcast_on_fixture() {
        let home = fixture::smart_home();
        let out = broadcast_discover(&home, &DiscoveryRequest::new(D, feature_of(C)));
        assert_eq!(ids(&out.path), vec!['D', 'A', 'C']);
        assert_eq!(out.hops, 2);
        assert_eq!(out.contacted, 4);
        assert_eq!(out.elapsed, SimTime::from_millis(2));

        let own = broadcast_discover(&home, &DiscoveryRequest::new(D, feature_of(D)));
        assert_eq!((own.hops, own.contacted), (0, 1));
        assert_eq!(own.elapsed, SimTime::ZERO);
    }

    #[test]
    fn broadcast_unreachable_holder() {
        let mut net = Network::new(TopologyKind::Fixture, 0, 5);
        for (u, v) in [(0, 1), (1, 2), (3, 4)] {
            net.add_comm_edge(DeviceId(u), DeviceId(v), Latency::from_millis(10))
                .unwrap();
        }
        let profiles = (0..5)
            .map(|i| crate::network::DeviceProfile::new(vec![FeatureId(i)]))
            .collect();
        net.set_profiles(5, 1, profiles).unwrap();
        let out = broadcast_discover(&net, &DiscoveryRequest::new(DeviceId(0), FeatureId(4)));
        assert_eq!(out.failure, Some(FailureReason::TtlExpired));
        assert_eq!(out.contacted, 3);

        let central = centralized_discover(&net, &DiscoveryRequest::new(DeviceId(0), FeatureId(4)));
        assert_eq!(central.failure, Some(FailureReason::Exhausted));
    }

    #[test]
    fn centralized_on_fixture() {
        let home = fixture::smart_home();
        let out = centralized_discover(&home, &DiscoveryRequest::new(D, feature_of(C)));
        assert_eq!(ids(&out.path), vec!['D', 'A', 'C']);
        assert_eq!((out.hops, out.contacted), (2, 3));
        let own = centralized_discover(&home, &DiscoveryRequest::new(D, feature_of(D)));
        assert_eq!(own.hops, 0);
        let none = centralized_discover(&home, &DiscoveryRequest::new(D, FeatureId(42)));
        assert_eq!(none.failure, Some(FailureReason::NoSuchFeature));
    }

    #[test]
    fn broadcast_prefers_lower_latency_over_fewer_hops() {
        // 0-1 slow (40), 0-2-1 fast (10 + 10)
        let mut net = Network::new(TopologyKind::Fixture, 0, 3);
        net.add_comm_edge(DeviceId(0), DeviceId(1), Latency::from_millis(40))
            .unwrap();
        net.add_comm_edge(DeviceId(0), DeviceId(2), Latency::from_millis(10))
            .unwrap();
        net.add_comm_edge(DeviceId(2), DeviceId(1), Latency::from_millis(10))
            .unwrap();
        let profiles = (0..3)
            .map(|i| crate::network::DeviceProfile::new(vec![FeatureId(i)]))
            .collect();
        net.set_profiles(3, 1, profiles).unwrap();
        let req = DiscoveryRequest::new(DeviceId(0), FeatureId(1));
        let flood = broadcast_discover(&net, &req);
        assert_eq!(flood.path, vec![DeviceId(0), DeviceId(2), DeviceId(1)]);
        assert_eq!(flood.elapsed, SimTime::from_millis(20));
        let central = centralized_discover(&net, &req);
        assert_eq!(central.hops, 1);
        assert_eq!(central.elapsed, SimTime::from_millis(40));
    }
}
