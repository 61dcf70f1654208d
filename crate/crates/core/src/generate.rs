//! Network generators: communication topology, feature profiles and the
//! social overlay.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::ids::{DeviceId, FeatureId, Latency};
use crate::network::{DeviceProfile, Network, RelationLabel, TopologyKind};
use crate::seed::{self, Domain};

/// Generated link latencies are uniform over this range, in microseconds.
pub const LATENCY_RANGE_US: core::ops::RangeInclusive<u32> = 10_000..=40_000;

const DEGREE_ATTEMPTS: usize = 100;
const REWIRE_ATTEMPTS: usize = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopologyParams {
    /// Configuration model with per-device degree uniform in `[dmin, dmax]`.
    Random { dmin: u32, dmax: u32 },
    /// Preferential attachment; each arriving device links to `m` others.
    ScaleFree { m: u32 },
}

impl TopologyParams {
    pub const DEFAULT_RANDOM: TopologyParams = TopologyParams::Random { dmin: 4, dmax: 10 };
    pub const DEFAULT_SCALE_FREE: TopologyParams = TopologyParams::ScaleFree { m: 1 };

    pub fn kind(self) -> TopologyKind {
        match self {
            TopologyParams::Random { .. } => TopologyKind::Random,
            TopologyParams::ScaleFree { .. } => TopologyKind::ScaleFree,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OverlayMode {
    /// Social edge only where the endpoints share a feature.
    Literal,
    /// Every communication edge is social; edges without a shared feature are
    /// labeled `Acquaintance`.
    #[default]
    Enriched,
}

impl OverlayMode {
    pub fn as_str(self) -> &'static str {
        match self {
            OverlayMode::Literal => "literal",
            OverlayMode::Enriched => "enriched",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("network needs at least one device")]
    NoDevices,
    #[error("degree bounds [{dmin}, {dmax}] are invalid for {n} devices")]
    DegreeBounds { dmin: u32, dmax: u32, n: usize },
    #[error("no feasible degree sequence found after {DEGREE_ATTEMPTS} attempts")]
    InfeasibleDegrees,
    #[error("attachment count m = {m} must satisfy 1 <= m < n = {n}")]
    AttachmentCount { m: u32, n: usize },
    #[error("cannot draw {per_device} distinct features from a pool of {pool}")]
    FeaturePool { pool: u32, per_device: u32 },
}

/// Generates a connected communication graph with frozen latencies. No
/// profiles or overlay yet.
pub fn generate_topology(
    params: TopologyParams,
    n: usize,
    seed: u64,
) -> Result<Network, GenerateError> {
    if n == 0 {
        return Err(GenerateError::NoDevices);
    }
    let mut rng = seed::rng(seed, Domain::Topology, 0);
    let graph = match params {
        TopologyParams::Random { dmin, dmax } => random_graph(n, dmin, dmax, &mut rng)?,
        TopologyParams::ScaleFree { m } => preferential_attachment(n, m, &mut rng)?,
    };

    let mut net = Network::new(params.kind(), seed, n);
    for (u, v) in graph.sorted_edges() {
        let latency = Latency::from_micros(rng.random_range(LATENCY_RANGE_US));
        net.add_comm_edge(DeviceId(u), DeviceId(v), latency)
            .expect("simple graph");
    }
    Ok(net)
}

/// Gives every device `per_device` distinct features drawn uniformly without
/// replacement from `[0, pool)`.
pub fn assign_features<R: Rng + ?Sized>(
    net: &mut Network,
    pool: u32,
    per_device: u32,
    rng: &mut R,
) -> Result<(), GenerateError> {
    if per_device == 0 || per_device > pool {
        return Err(GenerateError::FeaturePool { pool, per_device });
    }
    let profiles = (0..net.len())
        .map(|_| DeviceProfile::new(floyd_sample(pool, per_device, rng)))
        .collect();
    net.set_profiles(pool, per_device, profiles)
        .expect("profiles are valid by construction");
    Ok(())
}

/// Floyd's algorithm: `k` distinct values from `[0, pool)`.
fn floyd_sample<R: Rng + ?Sized>(pool: u32, k: u32, rng: &mut R) -> Vec<FeatureId> {
    let mut out: Vec<FeatureId> = Vec::with_capacity(k as usize);
    for j in (pool - k)..pool {
        let t = FeatureId(rng.random_range(0..=j));
        if out.contains(&t) {
            out.push(FeatureId(j));
        } else {
            out.push(t);
        }
    }
    out
}

/// Rebuilds the overlay from the current profiles.
pub fn build_overlay(net: &mut Network, mode: OverlayMode) {
    net.clear_overlay();
    let edges: Vec<(DeviceId, DeviceId)> = net.comm_edges().map(|(u, v, _)| (u, v)).collect();
    let mut labels = Vec::new();
    for (u, v) in edges {
        labels.clear();
        shared_features(
            net.profile(u).features(),
            net.profile(v).features(),
            &mut labels,
        );
        if labels.is_empty() {
            match mode {
                OverlayMode::Literal => continue,
                OverlayMode::Enriched => labels.push(RelationLabel::Acquaintance),
            }
        }
        net.add_social_edge(u, v, &labels)
            .expect("overlay edge sits on a comm edge");
    }
}

fn shared_features(a: &[FeatureId], b: &[FeatureId], out: &mut Vec<RelationLabel>) {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                out.push(RelationLabel::SharedFeature(a[i]));
                i += 1;
                j += 1;
            }
        }
    }
}

/// Simple undirected graph under construction.
struct EdgeSet {
    adj: Vec<BTreeSet<u32>>,
    edges: Vec<(u32, u32)>,
}

impl EdgeSet {
    fn new(n: usize) -> Self {
        EdgeSet {
            adj: vec![BTreeSet::new(); n],
            edges: Vec::new(),
        }
    }

    fn has(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].contains(&v)
    }

    fn add(&mut self, u: u32, v: u32) {
        self.adj[u as usize].insert(v);
        self.adj[v as usize].insert(u);
        self.edges.push((u, v));
    }

    fn remove_at(&mut self, idx: usize) -> (u32, u32) {
        let (u, v) = self.edges.swap_remove(idx);
        self.adj[u as usize].remove(&v);
        self.adj[v as usize].remove(&u);
        (u, v)
    }

    fn sorted_edges(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = self
            .edges
            .iter()
            .map(|&(u, v)| (u.min(v), u.max(v)))
            .collect();
        out.sort_unstable();
        out
    }

    /// Component label per vertex plus component sizes.
    fn components(&self) -> (Vec<u32>, Vec<usize>) {
        let n = self.adj.len();
        let mut label = vec![u32::MAX; n];
        let mut sizes = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if label[start] != u32::MAX {
                continue;
            }
            let c = sizes.len() as u32;
            label[start] = c;
            queue.push_back(start as u32);
            let mut size = 0;
            while let Some(u) = queue.pop_front() {
                size += 1;
                for &v in &self.adj[u as usize] {
                    if label[v as usize] == u32::MAX {
                        label[v as usize] = c;
                        queue.push_back(v);
                    }
                }
            }
            sizes.push(size);
        }
        (label, sizes)
    }

    /// Replaces edges `(a, b)` and `(x, y)` by `(a, x)` and `(b, y)` if the
    /// result stays simple. Degrees are preserved.
    fn can_swap(&self, (a, b): (u32, u32), (x, y): (u32, u32)) -> bool {
        a != x
            && b != y
            && !self.has(a, x)
            && !self.has(b, y)
            && !((a == y && b == x) || (a == b && x == y))
    }
}

fn random_graph<R: Rng + ?Sized>(
    n: usize,
    dmin: u32,
    dmax: u32,
    rng: &mut R,
) -> Result<EdgeSet, GenerateError> {
    let bounds_ok = dmin <= dmax && (dmax as usize) < n && (dmin >= 1 || n == 1);
    if !bounds_ok {
        return Err(GenerateError::DegreeBounds { dmin, dmax, n });
    }
    for _ in 0..DEGREE_ATTEMPTS {
        let degrees: Vec<u32> = (0..n).map(|_| rng.random_range(dmin..=dmax)).collect();
        let stubs: u64 = degrees.iter().map(|&d| u64::from(d)).sum();
        if stubs % 2 == 1 {
            continue;
        }
        if let Some(g) = configuration_model(&degrees, rng) {
            return Ok(g);
        }
    }
    Err(GenerateError::InfeasibleDegrees)
}

/// Stub matching; invalid pairs (self-loops, duplicates) are repaired by
/// degree-preserving swaps against random existing edges, then the graph is
/// made connected the same way.
fn configuration_model<R: Rng + ?Sized>(degrees: &[u32], rng: &mut R) -> Option<EdgeSet> {
    let n = degrees.len();
    let mut stubs: Vec<u32> = Vec::new();
    for (v, &d) in degrees.iter().enumerate() {
        stubs.extend(core::iter::repeat_n(v as u32, d as usize));
    }
    stubs.shuffle(rng);

    let mut g = EdgeSet::new(n);
    let mut bad = Vec::new();
    for pair in stubs.chunks_exact(2) {
        let (a, b) = (pair[0], pair[1]);
        if a == b || g.has(a, b) {
            bad.push((a, b));
        } else {
            g.add(a, b);
        }
    }

    for pending in bad {
        let mut placed = false;
        for _ in 0..REWIRE_ATTEMPTS {
            if g.edges.is_empty() {
                break;
            }
            let idx = rng.random_range(0..g.edges.len() as u32) as usize;
            let (mut x, mut y) = g.edges[idx];
            if rng.random_bool(0.5) {
                core::mem::swap(&mut x, &mut y);
            }
            if g.can_swap(pending, (x, y)) {
                g.remove_at(idx);
                g.add(pending.0, x);
                g.add(pending.1, y);
                placed = true;
                break;
            }
        }
        if !placed {
            return None;
        }
    }

    connect(&mut g, rng).then_some(g)
}

/// Merges components into the largest one with degree-preserving swaps.
fn connect<R: Rng + ?Sized>(g: &mut EdgeSet, rng: &mut R) -> bool {
    loop {
        let (label, sizes) = g.components();
        if sizes.len() <= 1 {
            return true;
        }
        let giant = (0..sizes.len())
            .max_by_key(|&c| (sizes[c], core::cmp::Reverse(c)))
            .unwrap() as u32;
        let other = (0..sizes.len() as u32).find(|&c| c != giant).unwrap();

        let inner: Vec<usize> = (0..g.edges.len())
            .filter(|&i| label[g.edges[i].0 as usize] == other)
            .collect();
        let outer: Vec<usize> = (0..g.edges.len())
            .filter(|&i| label[g.edges[i].0 as usize] == giant)
            .collect();
        if inner.is_empty() || outer.is_empty() {
            return false;
        }

        let before = sizes.len();
        let mut merged = false;
        for _ in 0..REWIRE_ATTEMPTS {
            let e1 = g.edges[inner[rng.random_range(0..inner.len() as u32) as usize]];
            let e2 = g.edges[outer[rng.random_range(0..outer.len() as u32) as usize]];
            if !g.can_swap(e1, e2) {
                continue;
            }
            let i1 = g.edges.iter().position(|&e| e == e1).unwrap();
            g.remove_at(i1);
            let i2 = g.edges.iter().position(|&e| e == e2).unwrap();
            g.remove_at(i2);
            g.add(e1.0, e2.0);
            g.add(e1.1, e2.1);
            if g.components().1.len() < before {
                merged = true;
                break;
            }
            // revert
            let j = g.edges.len();
            g.remove_at(j - 1);
            g.remove_at(j - 2);
            g.add(e1.0, e1.1);
            g.add(e2.0, e2.1);
        }
        if !merged {
            return false;
        }
    }
}

/// Preferential attachment seeded with a star on `m + 1` devices; produces
/// `m * (n - m)` edges.
fn preferential_attachment<R: Rng + ?Sized>(
    n: usize,
    m: u32,
    rng: &mut R,
) -> Result<EdgeSet, GenerateError> {
    if m == 0 || m as usize >= n {
        return Err(GenerateError::AttachmentCount { m, n });
    }
    let mut g = EdgeSet::new(n);
    // one entry per edge endpoint, so uniform picks are degree-proportional
    let mut endpoints: Vec<u32> = Vec::with_capacity(2 * m as usize * n);
    for leaf in 1..=m {
        g.add(0, leaf);
        endpoints.push(0);
        endpoints.push(leaf);
    }
    let mut targets: Vec<u32> = Vec::with_capacity(m as usize);
    for v in (m + 1)..n as u32 {
        targets.clear();
        while targets.len() < m as usize {
            let t = endpoints[rng.random_range(0..endpoints.len() as u32) as usize];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            g.add(v, t);
            endpoints.push(v);
            endpoints.push(t);
        }
    }
    Ok(g)
}
