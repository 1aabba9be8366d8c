use thiserror::Error;

/// Every failure the toolkit reports. Variants that reject a structure carry
/// 1-based witness indices so a failing case can be reproduced by hand.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("a matching needs a positive even number of points, got {0}")]
    OddLength(usize),
    #[error("point {point} is matched to {value}, outside 1..={len}")]
    OutOfRange {
        point: usize,
        value: usize,
        len: usize,
    },
    #[error("point {0} is matched to itself")]
    FixedPoint(usize),
    #[error("point {point} is matched to {partner} but {partner} is matched to {back}")]
    NotInvolution {
        point: usize,
        partner: usize,
        back: usize,
    },
    #[error("arcs ({0}, {2}) and ({1}, {3}) cross")]
    Crossing(usize, usize, usize, usize),
    #[error("arc systems have different sizes: {0} vs {1} points")]
    SizeMismatch(usize, usize),
    #[error("arcs close a loop of {cycle_len} points through point 1, not all {points}")]
    NotSingleLoop { cycle_len: usize, points: usize },
    #[error("not a permutation of 1..={len}: {reason}")]
    NotPermutation { len: usize, reason: String },
    #[error("not a meandric permutation: {0}")]
    NotMeandric(String),
    #[error("the orbit of 1 has length {orbit} but the permutation has size {len}")]
    NotSingleCycle { orbit: usize, len: usize },
    #[error("root index {k} outside 1..={len}")]
    RootOutOfRange { k: usize, len: usize },
    #[error("size {n} exceeds the enumeration cap {cap}")]
    SizeTooLarge { n: usize, cap: usize },
    #[error("size {n} exceeds the rejection sampling cap {cap}")]
    SizeTooLargeForRejection { n: usize, cap: usize },
    #[error("pattern of size {len} exceeds the cap {cap}")]
    PatternTooLarge { len: usize, cap: usize },
    #[error("rectangle [{a}, {b}] x [{c}, {d}] is not inside the unit square")]
    InvalidRectangle { a: f64, b: f64, c: f64, d: f64 },
    #[error("depth {depth} exceeds the memory guard {cap}")]
    DepthTooLarge { depth: u32, cap: u32 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
