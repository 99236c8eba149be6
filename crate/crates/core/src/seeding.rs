//! Seed derivation for reproducible sub-streams.
//!
//! Every randomized stage (dataset noise, skew assignment, weight init, batch
//! shuffling, augmentation) draws from its own stream derived from a master
//! seed and a purpose tag, so changing one stage's consumption pattern never
//! perturbs another's.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Derive a child seed from a master seed and a purpose tag.
///
/// Splitmix64 over the tag bytes; stable across platforms and releases.
pub fn sub_seed(master: u64, tag: &str) -> u64 {
    let mut h = splitmix64(master ^ 0x9e37_79b9_7f4a_7c15);
    for &b in tag.as_bytes() {
        h = splitmix64(h ^ u64::from(b));
    }
    h
}

/// Seeded deterministic RNG used throughout the crate.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
