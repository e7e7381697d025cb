//! Deterministic RNG streams. Every stochastic draw in the crate goes
//! through a `ChaCha8Rng` whose seed is derived from the scenario seed plus
//! a tuple of integers naming the purpose, so results do not depend on
//! evaluation order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes `parts` into `seed`.
pub fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(splitmix64(seed), |h, p| splitmix64(h ^ splitmix64(*p)))
}

pub fn stream(seed: u64, parts: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, parts))
}

/// Purpose tags.
pub(crate) mod tag {
    pub const PREDICT: u64 = 1;
    pub const TRUTH: u64 = 2;
    pub const ORACLE: u64 = 3;
    pub const REACH: u64 = 4;
    pub const SUITE: u64 = 5;
    pub const REPLAN: u64 = 6;
}
