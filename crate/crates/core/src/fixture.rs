//! The eight-device smart-home example.
//!
//! Devices: A = TV, B = vacuum, C = washing machine, D = telephone,
//! E = refrigerator, F = PC, G = microwave, H = boiler. The communication
//! graph carries exactly the nine social relations, each with a 1 ms
//! latency, and device `X` holds the single feature `X` (A = 0 ... H = 7), so a
//! request for feature `C` targets the washing machine alone.

use alloc::vec::Vec;

use crate::ids::{DeviceId, FeatureId, Latency};
use crate::network::{DeviceProfile, Network, RelationLabel, TopologyKind};

pub const A: DeviceId = DeviceId(0);
pub const B: DeviceId = DeviceId(1);
pub const C: DeviceId = DeviceId(2);
pub const D: DeviceId = DeviceId(3);
pub const E: DeviceId = DeviceId(4);
pub const F: DeviceId = DeviceId(5);
pub const G: DeviceId = DeviceId(6);
pub const H: DeviceId = DeviceId(7);

pub const RELATIONS: [(DeviceId, DeviceId, RelationLabel); 9] = [
    (E, A, RelationLabel::Family),
    (E, C, RelationLabel::Family),
    (A, C, RelationLabel::Family),
    (B, C, RelationLabel::Neighbor),
    (D, A, RelationLabel::Friend),
    (E, F, RelationLabel::Friend),
    (E, G, RelationLabel::Colleague),
    (E, H, RelationLabel::Colleague),
    (G, H, RelationLabel::Colleague),
];

/// Feature held only by `device`.
pub fn feature_of(device: DeviceId) -> FeatureId {
    FeatureId(device.0)
}

pub fn name(device: DeviceId) -> char {
    (b'A' + device.0 as u8) as char
}

pub fn smart_home() -> Network {
    let mut net = Network::new(TopologyKind::Fixture, 0, 8);
    for (u, v, label) in RELATIONS {
        net.add_comm_edge(u, v, Latency::from_millis(1)).unwrap();
        net.add_social_edge(u, v, &[label]).unwrap();
    }
    let profiles: Vec<DeviceProfile> = net
        .devices()
        .map(|d| DeviceProfile::new([feature_of(d)].into()))
        .collect();
    net.set_profiles(8, 1, profiles).unwrap();
    net
}
