//! Meanders and meandric permutations: exhaustive enumeration, a uniform
//! Markov chain sampler, permutation statistics, permuton queries and the
//! scaling experiments built on them.
//!
//! Sizes follow one convention throughout: a meander of size `n` has `2n`
//! points on the line, and its meandric and cyclic permutations have size
//! `2n`. Public indices are 1-based.

pub mod analytics;
pub mod enumerate;
pub mod error;
pub mod experiments;
pub mod io;
pub mod meander;
pub mod permutation;
pub mod permuton;
pub mod rng;
pub mod sampler;
pub mod stats;

pub use enumerate::{ClassTag, EnumerationReport};
pub use error::{Error, Result};
pub use experiments::{RegressionResult, ScalingRecord, Statistic};
pub use meander::{ArchSystem, Meander, Side};
pub use permutation::Permutation;
pub use permuton::{BoxCount, PermutonQuery};
pub use sampler::{ChainConfig, MeanderChain, Proposal};
