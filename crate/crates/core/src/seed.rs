//! Sub-seed derivation. Every random stream in a run is a ChaCha8 generator
//! keyed by a value mixed from the master seed, a domain tag and an index,
//! so streams never depend on execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Stream domains. Changing a value changes every derived output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    Topology = 1,
    Features = 2,
    Requests = 3,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive(seed: u64, domain: Domain, index: u64) -> u64 {
    splitmix64(splitmix64(seed ^ splitmix64(domain as u64)) ^ index)
}

pub fn rng(seed: u64, domain: Domain, index: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(derive(seed, domain, index))
}
