//! Exhaustive generation of small objects. These streams are the oracles the
//! statistical code is checked against, so they favour the obvious algorithm
//! over the fast one.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::analytics::{is_baxter, is_semi_baxter, is_strong_baxter};
use crate::error::{Error, Result};
use crate::meander::{cycle_len_through_zero, ArchSystem, Meander};
use crate::permutation::{next_lexicographic, Permutation};

/// Default largest meander size for full enumeration.
pub const MEANDER_CAP: usize = 8;
/// Default largest permutation size for `S_n` filters.
pub const PERMUTATION_CAP: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassTag {
    NoncrossingMatching,
    Meander,
    MeandricPermutation,
    Baxter,
    SemiBaxter,
    StrongBaxter,
}

impl ClassTag {
    pub const ALL: [ClassTag; 6] = [
        ClassTag::NoncrossingMatching,
        ClassTag::Meander,
        ClassTag::MeandricPermutation,
        ClassTag::Baxter,
        ClassTag::SemiBaxter,
        ClassTag::StrongBaxter,
    ];

    /// Membership test for the three permutation classes defined by
    /// forbidden patterns; `None` for the other tags.
    pub fn permutation_predicate(self) -> Option<fn(&Permutation) -> bool> {
        match self {
            ClassTag::Baxter => Some(is_baxter),
            ClassTag::SemiBaxter => Some(is_semi_baxter),
            ClassTag::StrongBaxter => Some(is_strong_baxter),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ClassTag::NoncrossingMatching => "noncrossing",
            ClassTag::Meander => "meander",
            ClassTag::MeandricPermutation => "meandric",
            ClassTag::Baxter => "baxter",
            ClassTag::SemiBaxter => "semibaxter",
            ClassTag::StrongBaxter => "strongbaxter",
        }
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        Ok(match key.as_str() {
            "noncrossing" | "noncrossingmatching" | "matching" => ClassTag::NoncrossingMatching,
            "meander" => ClassTag::Meander,
            "meandric" | "meandricpermutation" => ClassTag::MeandricPermutation,
            "baxter" => ClassTag::Baxter,
            "semibaxter" => ClassTag::SemiBaxter,
            "strongbaxter" => ClassTag::StrongBaxter,
            _ => return Err(Error::Parse(format!("unknown class {s:?}"))),
        })
    }
}

/// Summary line of one enumeration run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationReport {
    pub n: usize,
    pub count: u64,
    pub class_tag: ClassTag,
    pub elapsed_ns: u128,
}

/// Noncrossing perfect matchings of `2n` points in lexicographic order of
/// their partner arrays.
pub struct NoncrossingMatchings {
    current: Option<Vec<usize>>,
}

pub fn noncrossing_matchings(n: usize) -> NoncrossingMatchings {
    let current = (n >= 1).then(|| (0..2 * n).map(|i| i ^ 1).collect());
    NoncrossingMatchings { current }
}

impl Iterator for NoncrossingMatchings {
    type Item = ArchSystem;

    fn next(&mut self) -> Option<ArchSystem> {
        let current = self.current.as_mut()?;
        let out = ArchSystem::from_zero_based(current.clone())
            .expect("generator emits noncrossing matchings");
        if !advance_matching(current) {
            self.current = None;
        }
        Some(out)
    }
}

const UNSET: usize = usize::MAX;

/// Moves `p` to its lexicographic successor. The last open point whose arc
/// can be widened by two (staying inside its innermost enclosing arc) is
/// widened, and every point to its right that is not closed by an earlier
/// arc is re-paired with its neighbour, which is the smallest completion.
fn advance_matching(p: &mut [usize]) -> bool {
    let len = p.len();
    for i in (0..len).rev() {
        if p[i] < i {
            continue;
        }
        let bound = (0..i).rev().find(|&a| p[a] > i).map_or(len, |a| p[a]);
        let widened = p[i] + 2;
        if widened >= bound {
            continue;
        }
        for x in p.iter_mut().skip(i) {
            if *x == UNSET || *x >= i {
                *x = UNSET;
            }
        }
        p[i] = widened;
        p[widened] = i;
        let mut x = i + 1;
        while x < len {
            if p[x] == UNSET {
                debug_assert_eq!(p[x + 1], UNSET);
                p[x] = x + 1;
                p[x + 1] = x;
                x += 2;
            } else {
                x += 1;
            }
        }
        return true;
    }
    false
}

/// Catalan number `C_n`.
pub fn catalan(n: usize) -> u64 {
    let mut c = 1u64;
    for k in 0..n as u64 {
        c = c * 2 * (2 * k + 1) / (k + 2);
    }
    c
}

/// All meanders of size `n`: every pair of matchings whose union is one loop.
/// Upper systems vary slowest.
pub fn enumerate_meanders(n: usize) -> Result<impl Iterator<Item = Meander>> {
    enumerate_meanders_capped(n, MEANDER_CAP)
}

pub fn enumerate_meanders_capped(n: usize, cap: usize) -> Result<impl Iterator<Item = Meander>> {
    if n == 0 {
        return Err(Error::InvalidConfig("meander size must be positive".into()));
    }
    if n > cap {
        return Err(Error::SizeTooLarge { n, cap });
    }
    let systems: Arc<Vec<ArchSystem>> = Arc::new(noncrossing_matchings(n).collect());
    let inner = Arc::clone(&systems);
    let pts = 2 * n;
    Ok((0..systems.len()).flat_map(move |u| {
        let inner = Arc::clone(&inner);
        (0..inner.len()).filter_map(move |l| {
            let (upper, lower) = (&inner[u], &inner[l]);
            (cycle_len_through_zero(upper.raw(), lower.raw()) == pts)
                .then(|| Meander::from_parts_unchecked(upper.clone(), lower.clone()))
        })
    }))
}

/// Permutations of a class in lexicographic order (meandric permutations in
/// meander order).
pub fn enumerate_class(n: usize, tag: ClassTag) -> Result<Box<dyn Iterator<Item = Permutation>>> {
    match tag {
        ClassTag::MeandricPermutation => Ok(Box::new(
            enumerate_meanders(n)?.map(|m| m.meandric_permutation()),
        )),
        ClassTag::Baxter | ClassTag::SemiBaxter | ClassTag::StrongBaxter => {
            if n > PERMUTATION_CAP {
                return Err(Error::SizeTooLarge {
                    n,
                    cap: PERMUTATION_CAP,
                });
            }
            let pred = tag.permutation_predicate().expect("pattern class");
            Ok(Box::new(all_permutations(n).filter(pred)))
        }
        ClassTag::NoncrossingMatching | ClassTag::Meander => Err(Error::InvalidConfig(format!(
            "{tag} objects are not permutations"
        ))),
    }
}

/// All of `S_n` in lexicographic order.
pub fn all_permutations(n: usize) -> impl Iterator<Item = Permutation> {
    let mut state: Option<Vec<usize>> = Some((1..=n).collect());
    std::iter::from_fn(move || {
        let cur = state.as_mut()?;
        let out = Permutation::from_vec_unchecked(cur.clone());
        if !next_lexicographic(cur) {
            state = None;
        }
        Some(out)
    })
}

/// Counts a class and times the run.
pub fn count_class(n: usize, tag: ClassTag) -> Result<EnumerationReport> {
    let start = Instant::now();
    let count = match tag {
        ClassTag::NoncrossingMatching => noncrossing_matchings(n).count() as u64,
        ClassTag::Meander => enumerate_meanders(n)?.count() as u64,
        _ => enumerate_class(n, tag)?.count() as u64,
    };
    Ok(EnumerationReport {
        n,
        count,
        class_tag: tag,
        elapsed_ns: start.elapsed().as_nanos(),
    })
}
