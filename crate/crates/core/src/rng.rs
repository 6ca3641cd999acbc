//! Seeded random streams. Shard `k` of a run seeded with `s` draws from a
//! ChaCha8 generator keyed by a splitmix64 mix of `(s, k)`, so output is a
//! function of the seed and the shard count only.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// One splitmix64 output step.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of shard `shard` for a run seeded with `seed`.
pub fn derive_seed(seed: u64, shard: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ splitmix64(shard.wrapping_add(0xD1B5_4A32_D192_ED03)))
}

pub fn stream(seed: u64, shard: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, shard))
}
