//! Two-layer network model: the communication graph with per-link latency,
//! per-device feature profiles, and the social overlay built on top of it.
//!
//! Every mutation goes through a checked method, so a [`Network`] value always
//! satisfies: no self-loops, no parallel edges, symmetric adjacency, and every
//! social edge backed by a communication edge.

use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::ids::{DeviceId, FeatureId, Latency};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TopologyKind {
    Random,
    ScaleFree,
    /// Hand-built networks such as the smart-home example.
    Fixture,
}

impl TopologyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TopologyKind::Random => "random",
            TopologyKind::ScaleFree => "scale-free",
            TopologyKind::Fixture => "fixture",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "random" => Some(TopologyKind::Random),
            "scale-free" => Some(TopologyKind::ScaleFree),
            "fixture" => Some(TopologyKind::Fixture),
            _ => None,
        }
    }
}

impl fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Type of a social relation. Named kinds only occur in hand-built fixtures;
/// generated networks use `SharedFeature` and `Acquaintance`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelationLabel {
    Family,
    Friend,
    Neighbor,
    Colleague,
    SharedFeature(FeatureId),
    Acquaintance,
}

impl fmt::Display for RelationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelationLabel::Family => f.write_str("family"),
            RelationLabel::Friend => f.write_str("friend"),
            RelationLabel::Neighbor => f.write_str("neighbor"),
            RelationLabel::Colleague => f.write_str("colleague"),
            RelationLabel::SharedFeature(id) => write!(f, "shared:{id}"),
            RelationLabel::Acquaintance => f.write_str("acquaintance"),
        }
    }
}

impl RelationLabel {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "family" => RelationLabel::Family,
            "friend" => RelationLabel::Friend,
            "neighbor" => RelationLabel::Neighbor,
            "colleague" => RelationLabel::Colleague,
            "acquaintance" => RelationLabel::Acquaintance,
            other => {
                let id = other.strip_prefix("shared:")?.parse().ok()?;
                RelationLabel::SharedFeature(FeatureId(id))
            }
        })
    }
}

/// One direction of a communication edge, stored in the adjacency of its
/// source device.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Link {
    pub to: DeviceId,
    pub latency: Latency,
}

/// One direction of a social edge. Labels are sorted and non-empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SocialEdge {
    pub to: DeviceId,
    pub labels: Vec<RelationLabel>,
}

/// Sorted set of distinct features held by a device.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DeviceProfile {
    features: Vec<FeatureId>,
}

impl DeviceProfile {
    /// Builds a profile; features are sorted, duplicates are kept so that
    /// [`Network::set_profiles`] can reject them.
    pub fn new(mut features: Vec<FeatureId>) -> Self {
        features.sort_unstable();
        DeviceProfile { features }
    }

    pub fn features(&self) -> &[FeatureId] {
        &self.features
    }

    pub fn contains(&self, feature: FeatureId) -> bool {
        self.features.binary_search(&feature).is_ok()
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetworkError {
    #[error("device {0} is out of range")]
    UnknownDevice(DeviceId),
    #[error("self-loop on device {0}")]
    SelfLoop(DeviceId),
    #[error("parallel communication edge {0}-{1}")]
    ParallelEdge(DeviceId, DeviceId),
    #[error("social edge {0}-{1} has no communication edge underneath")]
    MissingCommEdge(DeviceId, DeviceId),
    #[error("social edge {0}-{1} has no relation labels")]
    EmptyLabels(DeviceId, DeviceId),
    #[error("expected {expected} profiles, got {got}")]
    ProfileCount { expected: usize, got: usize },
    #[error("device {device} has {got} features, expected {expected}")]
    ProfileSize {
        device: DeviceId,
        expected: usize,
        got: usize,
    },
    #[error("device {device} lists feature {feature} twice")]
    DuplicateFeature {
        device: DeviceId,
        feature: FeatureId,
    },
    #[error("device {device} holds feature {feature} outside the pool of {pool}")]
    FeatureOutOfRange {
        device: DeviceId,
        feature: FeatureId,
        pool: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    kind: TopologyKind,
    seed: u64,
    feature_pool: u32,
    features_per_device: u32,
    comm: Vec<Vec<Link>>,
    profiles: Vec<DeviceProfile>,
    overlay: Vec<Vec<SocialEdge>>,
    comm_edges: usize,
    social_edges: usize,
}

impl Network {
    /// An `n`-device network with no edges and empty profiles.
    pub fn new(kind: TopologyKind, seed: u64, n: usize) -> Self {
        Network {
            kind,
            seed,
            feature_pool: 0,
            features_per_device: 0,
            comm: (0..n).map(|_| Vec::new()).collect(),
            profiles: (0..n).map(|_| DeviceProfile::default()).collect(),
            overlay: (0..n).map(|_| Vec::new()).collect(),
            comm_edges: 0,
            social_edges: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.comm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comm.is_empty()
    }

    pub fn kind(&self) -> TopologyKind {
        self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn feature_pool(&self) -> u32 {
        self.feature_pool
    }

    pub fn features_per_device(&self) -> u32 {
        self.features_per_device
    }

    pub fn devices(&self) -> impl Iterator<Item = DeviceId> + '_ {
        (0..self.comm.len() as u32).map(DeviceId)
    }

    fn check(&self, d: DeviceId) -> Result<(), NetworkError> {
        if d.index() < self.comm.len() {
            Ok(())
        } else {
            Err(NetworkError::UnknownDevice(d))
        }
    }

    // ---- communication layer ----

    pub fn add_comm_edge(
        &mut self,
        u: DeviceId,
        v: DeviceId,
        latency: Latency,
    ) -> Result<(), NetworkError> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Err(NetworkError::SelfLoop(u));
        }
        let pos_u = match self.comm[u.index()].binary_search_by_key(&v, |l| l.to) {
            Ok(_) => return Err(NetworkError::ParallelEdge(u.min(v), u.max(v))),
            Err(p) => p,
        };
        self.comm[u.index()].insert(pos_u, Link { to: v, latency });
        let pos_v = self.comm[v.index()]
            .binary_search_by_key(&u, |l| l.to)
            .unwrap_err();
        self.comm[v.index()].insert(pos_v, Link { to: u, latency });
        self.comm_edges += 1;
        Ok(())
    }

    /// Removes a communication edge along with any social edge on top of it.
    /// Returns the removed latency.
    pub fn remove_comm_edge(&mut self, u: DeviceId, v: DeviceId) -> Option<Latency> {
        if u.index() >= self.len() || v.index() >= self.len() {
            return None;
        }
        let pu = self.comm[u.index()]
            .binary_search_by_key(&v, |l| l.to)
            .ok()?;
        let latency = self.comm[u.index()].remove(pu).latency;
        let pv = self.comm[v.index()]
            .binary_search_by_key(&u, |l| l.to)
            .expect("symmetric adjacency");
        self.comm[v.index()].remove(pv);
        self.comm_edges -= 1;
        if let Ok(su) = self.overlay[u.index()].binary_search_by_key(&v, |e| e.to) {
            self.overlay[u.index()].remove(su);
            let sv = self.overlay[v.index()]
                .binary_search_by_key(&u, |e| e.to)
                .expect("symmetric overlay");
            self.overlay[v.index()].remove(sv);
            self.social_edges -= 1;
        }
        Some(latency)
    }

    /// Communication links of `i`, sorted by neighbor id.
    pub fn comm_neighbors(&self, i: DeviceId) -> &[Link] {
        &self.comm[i.index()]
    }

    pub fn comm_degree(&self, i: DeviceId) -> usize {
        self.comm[i.index()].len()
    }

    pub fn latency(&self, u: DeviceId, v: DeviceId) -> Option<Latency> {
        let adj = self.comm.get(u.index())?;
        adj.binary_search_by_key(&v, |l| l.to)
            .ok()
            .map(|p| adj[p].latency)
    }

    pub fn comm_edge_count(&self) -> usize {
        self.comm_edges
    }

    /// Each communication edge once, as `(u, v, latency)` with `u < v`, in
    /// lexicographic order.
    pub fn comm_edges(&self) -> impl Iterator<Item = (DeviceId, DeviceId, Latency)> + '_ {
        self.comm.iter().enumerate().flat_map(|(u, adj)| {
            let u = DeviceId(u as u32);
            adj.iter()
                .filter(move |l| l.to > u)
                .map(move |l| (u, l.to, l.latency))
        })
    }

    // ---- profiles ----

    /// Installs one profile per device. Every profile must hold exactly
    /// `per_device` distinct features below `pool`.
    pub fn set_profiles(
        &mut self,
        pool: u32,
        per_device: u32,
        profiles: Vec<DeviceProfile>,
    ) -> Result<(), NetworkError> {
        if profiles.len() != self.len() {
            return Err(NetworkError::ProfileCount {
                expected: self.len(),
                got: profiles.len(),
            });
        }
        for (i, p) in profiles.iter().enumerate() {
            let device = DeviceId(i as u32);
            if p.len() != per_device as usize {
                return Err(NetworkError::ProfileSize {
                    device,
                    expected: per_device as usize,
                    got: p.len(),
                });
            }
            for w in p.features.windows(2) {
                if w[0] == w[1] {
                    return Err(NetworkError::DuplicateFeature {
                        device,
                        feature: w[0],
                    });
                }
            }
            if let Some(&feature) = p.features.iter().find(|f| f.0 >= pool) {
                return Err(NetworkError::FeatureOutOfRange {
                    device,
                    feature,
                    pool,
                });
            }
        }
        self.feature_pool = pool;
        self.features_per_device = per_device;
        self.profiles = profiles;
        Ok(())
    }

    pub fn profile(&self, i: DeviceId) -> &DeviceProfile {
        &self.profiles[i.index()]
    }

    pub fn profiles(&self) -> &[DeviceProfile] {
        &self.profiles
    }

    #[inline]
    pub fn holds(&self, i: DeviceId, feature: FeatureId) -> bool {
        self.profiles[i.index()].contains(feature)
    }

    // ---- social overlay ----

    /// Adds a social edge, or merges `labels` into an existing one.
    pub fn add_social_edge(
        &mut self,
        u: DeviceId,
        v: DeviceId,
        labels: &[RelationLabel],
    ) -> Result<(), NetworkError> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Err(NetworkError::SelfLoop(u));
        }
        if labels.is_empty() {
            return Err(NetworkError::EmptyLabels(u.min(v), u.max(v)));
        }
        if self.latency(u, v).is_none() {
            return Err(NetworkError::MissingCommEdge(u.min(v), u.max(v)));
        }
        let mut added = false;
        for (a, b) in [(u, v), (v, u)] {
            let adj = &mut self.overlay[a.index()];
            match adj.binary_search_by_key(&b, |e| e.to) {
                Ok(p) => {
                    let set = &mut adj[p].labels;
                    set.extend_from_slice(labels);
                    set.sort_unstable();
                    set.dedup();
                }
                Err(p) => {
                    let mut set = labels.to_vec();
                    set.sort_unstable();
                    set.dedup();
                    adj.insert(p, SocialEdge { to: b, labels: set });
                    added = true;
                }
            }
        }
        if added {
            self.social_edges += 1;
        }
        Ok(())
    }

    pub fn clear_overlay(&mut self) {
        for adj in &mut self.overlay {
            adj.clear();
        }
        self.social_edges = 0;
    }

    /// Social edges of `i`, sorted by neighbor id.
    pub fn social_neighbors(&self, i: DeviceId) -> &[SocialEdge] {
        &self.overlay[i.index()]
    }

    pub fn social_degree(&self, i: DeviceId) -> usize {
        self.overlay[i.index()].len()
    }

    pub fn are_social_neighbors(&self, u: DeviceId, v: DeviceId) -> bool {
        self.overlay[u.index()]
            .binary_search_by_key(&v, |e| e.to)
            .is_ok()
    }

    pub fn social_labels(&self, u: DeviceId, v: DeviceId) -> Option<&[RelationLabel]> {
        let adj = self.overlay.get(u.index())?;
        adj.binary_search_by_key(&v, |e| e.to)
            .ok()
            .map(|p| adj[p].labels.as_slice())
    }

    pub fn social_edge_count(&self) -> usize {
        self.social_edges
    }

    /// Each social edge once, as `(u, v, labels)` with `u < v`.
    pub fn social_edges(
        &self,
    ) -> impl Iterator<Item = (DeviceId, DeviceId, &[RelationLabel])> + '_ {
        self.overlay.iter().enumerate().flat_map(|(u, adj)| {
            let u = DeviceId(u as u32);
            adj.iter()
                .filter(move |e| e.to > u)
                .map(move |e| (u, e.to, e.labels.as_slice()))
        })
    }
}
