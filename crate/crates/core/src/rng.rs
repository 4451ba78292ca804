//! Seed derivation for independent, schedule-free random streams.
//!
//! Every stochastic step draws from a [`ChaCha8Rng`] whose seed is a hash of a
//! base seed and a path of indices (generation, slot, sample, ...). Parallel
//! workers therefore never share a stream and results do not depend on the
//! order in which work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash `base` together with `path` into a new seed.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(base), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// A fresh stream for `(base, path...)`.
pub fn stream(base: u64, path: &[u64]) -> Stream {
    ChaCha8Rng::seed_from_u64(derive_seed(base, path))
}
