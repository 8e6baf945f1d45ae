//! Seeded randomness. The generator identity is part of the reproducibility
//! contract: changing it changes every seeded picture, order and CSV.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Name and version of the generator behind every seeded operation.
pub const GENERATOR: &str = "chacha8-v1";

pub type Generator = ChaCha8Rng;

pub fn generator(seed: u64) -> Generator {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent seed from a master seed and a tuple of
/// coordinates; the result depends only on the inputs, never on scheduling.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(mix64(master), |acc, &p| mix64(acc ^ mix64(p)))
}
