//! Seeded random streams.
//!
//! Every random operation takes an explicit `u64` seed and draws from
//! xoshiro256++ initialised through SplitMix64 (`seed_from_u64`), so results
//! are reproducible across platforms. Replicate `i` of a run seeded with
//! `base` uses [`derived_seed`]`(base, i) = base + i`.

use rand::SeedableRng;
pub use rand_xoshiro::Xoshiro256PlusPlus as StreamRng;

pub fn seeded(seed: u64) -> StreamRng {
    StreamRng::seed_from_u64(seed)
}

pub fn derived_seed(base: u64, index: u64) -> u64 {
    base.wrapping_add(index)
}
