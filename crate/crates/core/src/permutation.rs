//! Permutations in one-line notation with 1-based values.

use std::fmt;

use crate::error::{Error, Result};

/// A bijection of `{1, ..., m}` stored in one-line notation.
///
/// `values()[i - 1]` is the image of `i`. The empty permutation is allowed
/// so that degenerate inputs can be represented, but every constructor that
/// comes from a combinatorial object produces `m >= 1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    values: Vec<usize>,
}

impl Permutation {
    /// Validates a one-line array.
    pub fn new(values: Vec<usize>) -> Result<Self> {
        let len = values.len();
        let mut seen = vec![false; len];
        for (i, &v) in values.iter().enumerate() {
            if v == 0 || v > len {
                return Err(Error::NotPermutation {
                    len,
                    reason: format!("value {v} at position {} is out of range", i + 1),
                });
            }
            if std::mem::replace(&mut seen[v - 1], true) {
                return Err(Error::NotPermutation {
                    len,
                    reason: format!("value {v} appears twice"),
                });
            }
        }
        Ok(Permutation { values })
    }

    /// Wraps values already known to be a bijection of `1..=len`.
    pub(crate) fn from_vec_unchecked(values: Vec<usize>) -> Self {
        debug_assert!(Permutation::new(values.clone()).is_ok());
        Permutation { values }
    }

    /// Builds a permutation from 0-based images `0..len`.
    pub(crate) fn from_zero_based(images: impl IntoIterator<Item = usize>) -> Self {
        Self::from_vec_unchecked(images.into_iter().map(|v| v + 1).collect())
    }

    pub fn identity(m: usize) -> Self {
        Permutation {
            values: (1..=m).collect(),
        }
    }

    /// `m, m-1, ..., 1`.
    pub fn decreasing(m: usize) -> Self {
        Permutation {
            values: (1..=m).rev().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Image of the 1-based position `i`.
    #[inline]
    pub fn at(&self, i: usize) -> usize {
        self.values[i - 1]
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn into_values(self) -> Vec<usize> {
        self.values
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.values.iter().enumerate() {
            inv[v - 1] = i + 1;
        }
        Permutation { values: inv }
    }

    /// Reads the one-line array right to left.
    pub fn reverse(&self) -> Permutation {
        Permutation {
            values: self.values.iter().rev().copied().collect(),
        }
    }

    /// Replaces each value `v` by `m + 1 - v`.
    pub fn complement(&self) -> Permutation {
        let m = self.len();
        Permutation {
            values: self.values.iter().map(|&v| m + 1 - v).collect(),
        }
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.len() != other.len() {
            return Err(Error::SizeMismatch(self.len(), other.len()));
        }
        Ok(Permutation {
            values: other.values.iter().map(|&v| self.values[v - 1]).collect(),
        })
    }

    /// Rank-reduces an arbitrary sequence of distinct keys; ties keep index order.
    pub fn standardize<T: PartialOrd>(keys: &[T]) -> Permutation {
        let mut idx: Vec<usize> = (0..keys.len()).collect();
        idx.sort_by(|&a, &b| {
            keys[a]
                .partial_cmp(&keys[b])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let mut values = vec![0; keys.len()];
        for (rank, &i) in idx.iter().enumerate() {
            values[i] = rank + 1;
        }
        Permutation { values }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({self})")
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Permutation {
    type Err = Error;

    /// Parses `1,4,3,2` (commas or whitespace).
    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|e| Error::Parse(format!("bad entry {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::new(values)
    }
}

/// Advances `a` to the next permutation in lexicographic order.
/// Returns `false` (leaving `a` sorted ascending) after the last one.
pub(crate) fn next_lexicographic<T: Ord>(a: &mut [T]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        a.reverse();
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}
