//! Per-device social metrics over the overlay and the composite rank
//! `R = k * d * c * b`.
//!
//! All metrics are local: they only look at a device's social neighbors and
//! the social edges among them.

use alloc::vec::Vec;

use crate::ids::DeviceId;
use crate::network::{Network, RelationLabel, TopologyKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankEntry {
    pub device: DeviceId,
    /// Overlay degree.
    pub k: u32,
    /// Number of distinct relation labels across the device's social edges.
    pub d: u32,
    /// Local clustering coefficient.
    pub c: f64,
    /// Local betweenness.
    pub b: f64,
    pub rank: f64,
}

/// Identifies the network a [`RankTable`] was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fingerprint {
    pub seed: u64,
    pub kind: TopologyKind,
    pub devices: usize,
    pub social_edges: usize,
}

impl Fingerprint {
    pub fn of(net: &Network) -> Self {
        Fingerprint {
            seed: net.seed(),
            kind: net.kind(),
            devices: net.len(),
            social_edges: net.social_edge_count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    entries: Vec<RankEntry>,
    fingerprint: Fingerprint,
}

impl RankTable {
    pub fn entries(&self) -> &[RankEntry] {
        &self.entries
    }

    pub fn entry(&self, i: DeviceId) -> &RankEntry {
        &self.entries[i.index()]
    }

    pub fn rank(&self, i: DeviceId) -> f64 {
        self.entries[i.index()].rank
    }

    pub fn fingerprint(&self) -> Fingerprint {
        self.fingerprint
    }

    pub fn matches(&self, net: &Network) -> bool {
        self.fingerprint == Fingerprint::of(net)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn diversity(net: &Network, i: DeviceId) -> u32 {
    let mut kinds: Vec<RelationLabel> = net
        .social_neighbors(i)
        .iter()
        .flat_map(|e| e.labels.iter().copied())
        .collect();
    kinds.sort_unstable();
    kinds.dedup();
    kinds.len() as u32
}

/// Number of social edges whose endpoints are both neighbors of `i`.
fn neighbor_links(net: &Network, i: DeviceId) -> usize {
    let nbrs = net.social_neighbors(i);
    let mut links = 0;
    for s in nbrs {
        for t in net.social_neighbors(s.to) {
            if t.to > s.to && nbrs.binary_search_by_key(&t.to, |e| e.to).is_ok() {
                links += 1;
            }
        }
    }
    links
}

fn ordered_pairs(k: usize) -> f64 {
    (k * (k - 1)) as f64
}

/// `2 * |edges among neighbors| / (k (k - 1))`, or 0 when `k <= 1`.
pub fn clustering_coefficient(net: &Network, i: DeviceId) -> f64 {
    let k = net.social_degree(i);
    if k <= 1 {
        return 0.0;
    }
    2.0 * neighbor_links(net, i) as f64 / ordered_pairs(k)
}

/// Fraction of ordered neighbor pairs `(s, t)` with `i` on a shortest `s`-`t`
/// path inside the subgraph induced by `i` and its neighbors; 0 when `k <= 1`.
///
/// In that subgraph every pair of neighbors is at distance 1 (adjacent) or 2
/// (through `i`), so `i` lies on a shortest path exactly for the non-adjacent
/// pairs.
pub fn local_betweenness(net: &Network, i: DeviceId) -> f64 {
    let k = net.social_degree(i);
    if k <= 1 {
        return 0.0;
    }
    let pairs = ordered_pairs(k);
    (pairs - 2.0 * neighbor_links(net, i) as f64) / pairs
}

fn entry(net: &Network, i: DeviceId) -> RankEntry {
    let k = net.social_degree(i);
    let d = diversity(net, i);
    let (c, b) = if k <= 1 {
        (0.0, 0.0)
    } else {
        let pairs = ordered_pairs(k);
        let links = 2.0 * neighbor_links(net, i) as f64;
        (links / pairs, (pairs - links) / pairs)
    };
    RankEntry {
        device: i,
        k: k as u32,
        d,
        c,
        b,
        rank: k as f64 * f64::from(d) * c * b,
    }
}

pub fn build_rank_table(net: &Network) -> RankTable {
    RankTable {
        entries: net.devices().map(|i| entry(net, i)).collect(),
        fingerprint: Fingerprint::of(net),
    }
}

/// Brute-force reference implementations used to cross-check the fast paths.
pub mod oracle {
    use alloc::collections::VecDeque;
    use alloc::vec;
    use alloc::vec::Vec;

    use crate::ids::DeviceId;
    use crate::network::Network;

    /// Induced subgraph on `i` and its social neighbors; vertex 0 is `i`.
    fn neighborhood(net: &Network, i: DeviceId) -> Vec<Vec<bool>> {
        let mut verts = vec![i];
        verts.extend(net.social_neighbors(i).iter().map(|e| e.to));
        let m = verts.len();
        let mut adj = vec![vec![false; m]; m];
        for a in 0..m {
            for b in 0..m {
                if a != b && net.are_social_neighbors(verts[a], verts[b]) {
                    adj[a][b] = true;
                }
            }
        }
        adj
    }

    fn bfs(adj: &[Vec<bool>], src: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; adj.len()];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for v in 0..adj.len() {
                if adj[u][v] && dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Enumerates every shortest `s`-`t` path and reports whether any of them
    /// visits `via`.
    fn some_shortest_path_visits(
        adj: &[Vec<bool>],
        dist_from_s: &[usize],
        s: usize,
        t: usize,
        via: usize,
    ) -> bool {
        if dist_from_s[t] == usize::MAX {
            return false;
        }
        let mut paths: Vec<Vec<usize>> = vec![vec![s]];
        for _ in 0..dist_from_s[t] {
            let mut next = Vec::new();
            for p in &paths {
                let last = *p.last().unwrap();
                for v in 0..adj.len() {
                    if adj[last][v] && dist_from_s[v] == dist_from_s[last] + 1 {
                        let mut q = p.clone();
                        q.push(v);
                        next.push(q);
                    }
                }
            }
            paths = next;
        }
        paths
            .iter()
            .filter(|p| *p.last().unwrap() == t)
            .any(|p| p[1..p.len() - 1].contains(&via))
    }

    pub fn oracle_betweenness(net: &Network, i: DeviceId) -> f64 {
        let adj = neighborhood(net, i);
        let k = adj.len() - 1;
        if k <= 1 {
            return 0.0;
        }
        let mut hits = 0usize;
        for s in 1..=k {
            let dist = bfs(&adj, s);
            for t in 1..=k {
                if s != t && some_shortest_path_visits(&adj, &dist, s, t, 0) {
                    hits += 1;
                }
            }
        }
        hits as f64 / (k * (k - 1)) as f64
    }

    /// Pairwise adjacency scan over the neighbor list.
    pub fn oracle_clustering(net: &Network, i: DeviceId) -> f64 {
        let adj = neighborhood(net, i);
        let k = adj.len() - 1;
        if k <= 1 {
            return 0.0;
        }
        let mut links = 0usize;
        for (s, row) in adj.iter().enumerate().skip(1) {
            links += row[s + 1..].iter().filter(|&&e| e).count();
        }
        2.0 * links as f64 / (k * (k - 1)) as f64
    }
}
