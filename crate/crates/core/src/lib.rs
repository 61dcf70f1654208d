//! Social-aware distributed device discovery.
//!
//! This crate holds the algorithmic core of the simulator and only needs
//! `alloc`:
//!
//! - [`network`]: the two-layer model (communication graph plus social overlay)
//! - [`generate`]: random and scale-free topologies, feature profiles, overlay construction
//! - [`ranking`]: per-device degree, diversity, local clustering, local betweenness and rank
//! - [`discovery`]: rank-ordered depth-limited DFS, broadcast flooding and the centralized oracle
//! - [`metrics`]: success rate, contacted devices, hop counts and hop histograms
//! - [`workload`]: deterministic request workloads with per-request RNG streams
//!
//! File formats, CSV output and the command line live in the `sand` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod discovery;
pub mod fixture;
pub mod generate;
pub mod ids;
pub mod metrics;
pub mod network;
pub mod ranking;
pub mod seed;
pub mod workload;

pub use discovery::{
    broadcast_discover, centralized_discover, order_neighbors, sand_discover, sand_discover_traced,
    DiscoveryOutcome, DiscoveryRequest, FailureReason, TraceAction, TraceEvent,
};
pub use generate::{
    assign_features, build_overlay, generate_topology, GenerateError, OverlayMode, TopologyParams,
};
pub use ids::{DeviceId, FeatureId, Latency, SimTime};
pub use metrics::{hop_distribution, summarize, HopHistogram, MetricsError, MetricsSummary};
pub use network::{
    DeviceProfile, Link, Network, NetworkError, RelationLabel, SocialEdge, TopologyKind,
};
pub use ranking::{build_rank_table, RankEntry, RankTable};
pub use workload::{RequestWorkload, Scheme, WorkloadError};
