//! Aggregation of discovery outcomes into success rate, average contacted
//! devices and average hop count. Averages only cover successful requests.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::discovery::DiscoveryOutcome;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("cannot summarize an empty outcome set")]
    Empty,
}

/// Successful discoveries per hop count, dense from 0 to the largest
/// observed hop count.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HopHistogram(Vec<u64>);

impl HopHistogram {
    pub fn from_counts(counts: Vec<u64>) -> Self {
        HopHistogram(counts)
    }

    pub fn counts(&self) -> &[u64] {
        &self.0
    }

    pub fn get(&self, hops: usize) -> u64 {
        self.0.get(hops).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    /// Most frequent hop count (smallest on ties); `None` without successes.
    pub fn mode(&self) -> Option<usize> {
        let best = *self.0.iter().max()?;
        if best == 0 {
            return None;
        }
        self.0.iter().position(|&c| c == best)
    }
}

pub fn hop_distribution(outcomes: &[DiscoveryOutcome]) -> HopHistogram {
    let mut counts: Vec<u64> = Vec::new();
    for o in outcomes.iter().filter(|o| o.success()) {
        let h = o.hops as usize;
        if counts.len() <= h {
            counts.resize(h + 1, 0);
        }
        counts[h] += 1;
    }
    HopHistogram(counts)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsSummary {
    pub scheme: String,
    /// Feature-pool size of the run; 0 when not applicable.
    pub features: u32,
    pub requests: u64,
    pub successes: u64,
    pub success_rate: f64,
    pub avg_contacted: f64,
    pub avg_hops: f64,
    pub hop_histogram: HopHistogram,
}

impl MetricsSummary {
    pub fn with_features(mut self, features: u32) -> Self {
        self.features = features;
        self
    }
}

pub fn summarize(
    scheme: &str,
    outcomes: &[DiscoveryOutcome],
) -> Result<MetricsSummary, MetricsError> {
    if outcomes.is_empty() {
        return Err(MetricsError::Empty);
    }
    let (mut successes, mut contacted, mut hops) = (0u64, 0u64, 0u64);
    for o in outcomes.iter().filter(|o| o.success()) {
        successes += 1;
        contacted += u64::from(o.contacted);
        hops += u64::from(o.hops);
    }
    let avg = |total: u64| {
        if successes == 0 {
            0.0
        } else {
            total as f64 / successes as f64
        }
    };
    Ok(MetricsSummary {
        scheme: scheme.to_string(),
        features: 0,
        requests: outcomes.len() as u64,
        successes,
        success_rate: successes as f64 / outcomes.len() as f64,
        avg_contacted: avg(contacted),
        avg_hops: avg(hops),
        hop_histogram: hop_distribution(outcomes),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discovery::FailureReason;
    use crate::ids::{DeviceId, SimTime};
    use alloc::vec;

    fn ok(hops: u32, contacted: u32) -> DiscoveryOutcome {
        DiscoveryOutcome {
            path: (0..=hops).map(DeviceId).collect(),
            hops,
            contacted,
            elapsed: SimTime::ZERO,
            failure: None,
        }
    }

    fn fail() -> DiscoveryOutcome {
        DiscoveryOutcome {
            path: vec![],
            hops: 0,
            contacted: 9,
            elapsed: SimTime::ZERO,
            failure: Some(FailureReason::TtlExpired),
        }
    }

    #[test]
    fn half_success() {
        let s = summarize("sand", &[ok(2, 4), fail()]).unwrap();
        assert_eq!(s.success_rate, 0.5);
        assert_eq!(s.avg_hops, 2.0);
        assert_eq!(s.avg_contacted, 4.0);
        assert_eq!(s.requests, 2);
        assert_eq!(s.hop_histogram.total(), 1);
    }

    #[test]
    fn empty_is_an_error() {
        assert_eq!(summarize("sand", &[]), Err(MetricsError::Empty));
    }

    #[test]
    fn histogram_counting() {
        let h = hop_distribution(&[ok(3, 4), ok(3, 5), ok(5, 6)]);
        assert_eq!(h.counts(), &[0, 0, 0, 2, 0, 1]);
        assert_eq!(h.mode(), Some(3));
        assert_eq!(h.get(5), 1);
        assert_eq!(h.get(40), 0);
    }

    #[test]
    fn histogram_without_successes() {
        let h = hop_distribution(&[fail(), fail()]);
        assert!(h.counts().iter().all(|&c| c == 0));
        assert_eq!(h.total(), 0);
        assert_eq!(h.mode(), None);
        let s = summarize("broadcast", &[fail()]).unwrap();
        assert_eq!(
            (s.avg_hops, s.avg_contacted, s.success_rate),
            (0.0, 0.0, 0.0)
        );
    }
}
