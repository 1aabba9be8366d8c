//! Fixtures shared by the benchmarks.

use meandric::sampler::{default_burn_in, MeanderChain};

/// A chain of size `n` run through its default burn-in, so that timings
/// reflect typical states rather than the snake it starts from.
pub fn warm_chain(n: usize, seed: u64) -> MeanderChain {
    let mut chain = MeanderChain::new(n, seed);
    chain.run(default_burn_in(n));
    chain
}
