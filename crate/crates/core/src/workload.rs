//! Deterministic request workloads.
//!
//! Request `i` draws from its own RNG stream keyed by `(seed, i)`, so a
//! workload is identical however it is generated or consumed.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use thiserror::Error;

use crate::discovery::DiscoveryRequest;
use crate::ids::{DeviceId, FeatureId, SimTime};
use crate::network::Network;
use crate::seed::{self, Domain};

const SOURCE_ATTEMPTS: usize = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    Sand,
    Broadcast,
    Centralized,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Sand, Scheme::Broadcast, Scheme::Centralized];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Sand => "sand",
            Scheme::Broadcast => "broadcast",
            Scheme::Centralized => "centralized",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Scheme::ALL.into_iter().find(|x| x.as_str() == s)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WorkloadError {
    #[error("no device can issue a satisfiable request")]
    Unsatisfiable,
    #[error("network has no devices")]
    EmptyNetwork,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequestWorkload {
    pub requests: Vec<DiscoveryRequest>,
}

/// Holder counts per feature plus the list of features with any holder.
struct FeatureIndex {
    holders: Vec<u32>,
    held: Vec<FeatureId>,
}

impl FeatureIndex {
    fn new(net: &Network) -> Self {
        let mut holders = vec![0u32; net.feature_pool() as usize];
        for p in net.profiles() {
            for f in p.features() {
                holders[f.0 as usize] += 1;
            }
        }
        let held = (0..holders.len() as u32)
            .filter(|&f| holders[f as usize] > 0)
            .map(FeatureId)
            .collect();
        FeatureIndex { holders, held }
    }

    /// Held by at least one device other than `source`.
    fn eligible(&self, net: &Network, source: DeviceId, f: FeatureId) -> bool {
        let count = self.holders[f.0 as usize];
        count > 1 || (count == 1 && !net.holds(source, f))
    }

    fn eligible_count(&self, net: &Network, source: DeviceId) -> usize {
        let only_source = net
            .profile(source)
            .features()
            .iter()
            .filter(|f| self.holders[f.0 as usize] == 1)
            .count();
        self.held.len() - only_source
    }
}

impl RequestWorkload {
    /// `count` requests with uniform sources and, per source, a uniform
    /// feature among those held by some other device.
    pub fn generate(
        net: &Network,
        seed: u64,
        count: usize,
        ttl: SimTime,
        depth_limit: u32,
    ) -> Result<Self, WorkloadError> {
        if net.is_empty() {
            return Err(WorkloadError::EmptyNetwork);
        }
        let index = FeatureIndex::new(net);
        let n = net.len() as u32;
        let requests = (0..count as u64)
            .map(|i| {
                let mut rng = seed::rng(seed, Domain::Requests, i);
                let source = (0..SOURCE_ATTEMPTS)
                    .map(|_| DeviceId(rng.random_range(0..n)))
                    .find(|&s| index.eligible_count(net, s) > 0)
                    .ok_or(WorkloadError::Unsatisfiable)?;
                let feature = loop {
                    let f = index.held[rng.random_range(0..index.held.len() as u32) as usize];
                    if index.eligible(net, source, f) {
                        break f;
                    }
                };
                Ok(DiscoveryRequest {
                    source,
                    feature,
                    ttl,
                    depth_limit,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RequestWorkload { requests })
    }

    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{DeviceProfile, TopologyKind};

    fn net_with(profiles: &[&[u32]], pool: u32) -> Network {
        let mut net = Network::new(TopologyKind::Fixture, 0, profiles.len());
        let per = profiles[0].len() as u32;
        let ps = profiles
            .iter()
            .map(|p| DeviceProfile::new(p.iter().map(|&f| FeatureId(f)).collect()))
            .collect();
        net.set_profiles(pool, per, ps).unwrap();
        net
    }

    #[test]
    fn requests_avoid_source_only_and_unheld_features() {
        // feature 3 unheld; 0 only on device 0; 1 on both
        let net = net_with(&[&[0, 1], &[1, 2]], 4);
        let w = RequestWorkload::generate(&net, 7, 500, SimTime::INFINITE, 10).unwrap();
        for r in &w.requests {
            assert_ne!(r.feature, FeatureId(3));
            let other = DeviceId(1 - r.source.0);
            assert!(net.holds(other, r.feature), "{r:?}");
        }
        assert!(w.requests.iter().any(|r| r.source == DeviceId(0)));
        assert!(w.requests.iter().any(|r| r.source == DeviceId(1)));
    }

    #[test]
    fn prefix_stable() {
        let net = net_with(&[&[0, 1], &[1, 2], &[2, 3]], 4);
        let long = RequestWorkload::generate(&net, 11, 50, SimTime::INFINITE, 5).unwrap();
        let short = RequestWorkload::generate(&net, 11, 20, SimTime::INFINITE, 5).unwrap();
        assert_eq!(&long.requests[..20], &short.requests[..]);
    }

    #[test]
    fn single_device_is_unsatisfiable() {
        let net = net_with(&[&[0]], 1);
        assert_eq!(
            RequestWorkload::generate(&net, 1, 1, SimTime::INFINITE, 1),
            Err(WorkloadError::Unsatisfiable)
        );
    }

    #[test]
    fn scheme_names() {
        for s in Scheme::ALL {
            assert_eq!(Scheme::parse(s.as_str()), Some(s));
        }
        assert_eq!(Scheme::parse("flood"), None);
    }
}
