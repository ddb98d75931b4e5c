//! Counter-based seed derivation.
//!
//! Every random stream in the crate is keyed by `(master seed, stream index)`
//! through a SplitMix64 finalizer, so trials, rows and pairs can be drawn in
//! any order or on any thread and still reproduce the same values.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of sub-stream `index` under `seed`.
#[inline]
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    mix64(
        mix64(seed.wrapping_add(GOLDEN))
            ^ index
                .wrapping_mul(GOLDEN)
                .wrapping_add(0x632B_E59B_D9B4_E019),
    )
}

/// Uniform draw in `[0, 1)` with 53 random bits, keyed by `(seed, index)`.
#[inline]
pub fn unit_uniform(seed: u64, index: u64) -> f64 {
    (derive_seed(seed, index) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// A seeded stream generator for sub-stream `index`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, index))
}
