//! Deterministic seed derivation.
//!
//! Every stochastic stage (init, shuffling, dropout, sampling, synthetic
//! generation) draws from its own ChaCha stream derived from the run's master
//! seed, so runs are reproducible and stages can be reordered or parallelized
//! without perturbing each other.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose tags for derived streams. Values are arbitrary but fixed.
pub mod purpose {
    pub const WEIGHT_INIT: u64 = 0x01;
    pub const EPOCH_SHUFFLE: u64 = 0x02;
    pub const DROPOUT: u64 = 0x03;
    pub const NEGATIVE_SAMPLE: u64 = 0x04;
    pub const SPLIT: u64 = 0x05;
    pub const SYNTHETIC: u64 = 0x06;
    pub const TREE: u64 = 0x07;
    pub const CONVERSIONS: u64 = 0x08;
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Derives a child seed from a master seed, a purpose tag, and an index
/// (epoch number, tree index, ...).
pub fn derive_seed(master: u64, purpose: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master ^ splitmix64(purpose)) ^ index)
}

/// Seeded generator for a derived stream.
pub fn stream(master: u64, purpose: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, purpose, index))
}
