//! The single PRNG used by every sampled computation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Name and version recorded in reports next to each seed.
pub const PRNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.9)";

pub type Prng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Prng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Per-shard seed derivation so that parallel fan-out stays deterministic.
pub fn shard_seed(seed: u64, shard: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ shard.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
