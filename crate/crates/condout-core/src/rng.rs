//! Deterministic random number generation.
//!
//! All randomized routines take explicit `u64` seeds. Sub-seeds for folds and
//! repeats are derived with a SplitMix64 mix so that changing one component of
//! the run layout never shifts the streams of unrelated components.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// One SplitMix64 step: mixes `state + index`-style inputs into a well
/// distributed 64-bit output.
#[inline]
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Derive an independent sub-seed from a base seed and a stream tag.
pub fn derive_seed(base: u64, tag: u64) -> u64 {
    splitmix64(base ^ splitmix64(tag))
}

/// Build the generator used across the crate from a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}
