//! Permutation statistics: longest monotone subsequences, pattern counts and
//! the Baxter family of vincular-pattern classes.

use rand::Rng;

use crate::error::{Error, Result};
use crate::permutation::Permutation;
use crate::rng::seeded;

/// Longest strictly increasing subsequence of any sequence, by patience
/// sorting: `tails[l]` is the smallest possible last element of an increasing
/// run of length `l + 1`.
pub fn lis_of<T: Ord + Copy>(seq: &[T]) -> usize {
    let mut tails: Vec<T> = Vec::with_capacity(64);
    for &x in seq {
        let at = tails.partition_point(|&t| t < x);
        if at == tails.len() {
            tails.push(x);
        } else {
            tails[at] = x;
        }
    }
    tails.len()
}

/// Length of the longest increasing subsequence.
pub fn lis(sigma: &Permutation) -> usize {
    lis_of(sigma.values())
}

/// Length of the longest decreasing subsequence.
pub fn lds(sigma: &Permutation) -> usize {
    let m = sigma.len();
    let negated: Vec<usize> = sigma.values().iter().map(|&v| m - v).collect();
    lis_of(&negated)
}

/// `lis · lds ≥ m` holds for every permutation of size `m`.
pub fn erdos_szekeres_holds(sigma: &Permutation) -> bool {
    lis(sigma) * lds(sigma) >= sigma.len()
}

/// Which of the three forbidden configurations a triple `i < j < k` (with
/// `j + 1` a valid position) can witness. Values are compared as
/// `(σ(i), σ(j), σ(j+1), σ(k))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Forbidden {
    /// `σ(j+1) < σ(i) < σ(k) < σ(j)`
    Semi,
    /// `σ(j) < σ(k) < σ(i) < σ(j+1)`
    Baxter,
    /// `σ(j+1) < σ(k) < σ(i) < σ(j)`
    Strong,
}

impl Forbidden {
    fn matches(self, vi: usize, vj: usize, vj1: usize, vk: usize) -> bool {
        match self {
            Forbidden::Semi => vj1 < vi && vi < vk && vk < vj,
            Forbidden::Baxter => vj < vk && vk < vi && vi < vj1,
            Forbidden::Strong => vj1 < vk && vk < vi && vi < vj,
        }
    }
}

/// Position witness `(i, j, k)` (1-based) of the first triple matching any of
/// `patterns`, scanning `i < j < k` with `j + 1 ≤ m`.
fn find_forbidden(sigma: &Permutation, patterns: &[Forbidden]) -> Option<(usize, usize, usize)> {
    let v = sigma.values();
    let m = v.len();
    for j in 1..m.saturating_sub(1) {
        let (vj, vj1) = (v[j], v[j + 1]);
        for i in 0..j {
            let vi = v[i];
            // every pattern needs σ(i) strictly between σ(j) and σ(j+1)
            if !((vj1 < vi && vi < vj) || (vj < vi && vi < vj1)) {
                continue;
            }
            for (k, &vk) in v.iter().enumerate().skip(j + 1) {
                if patterns.iter().any(|p| p.matches(vi, vj, vj1, vk)) {
                    return Some((i + 1, j + 1, k + 1));
                }
            }
        }
    }
    None
}

pub fn is_semi_baxter(sigma: &Permutation) -> bool {
    find_forbidden(sigma, &[Forbidden::Semi]).is_none()
}

pub fn is_baxter(sigma: &Permutation) -> bool {
    find_forbidden(sigma, &[Forbidden::Semi, Forbidden::Baxter]).is_none()
}

pub fn is_strong_baxter(sigma: &Permutation) -> bool {
    find_forbidden(
        sigma,
        &[Forbidden::Semi, Forbidden::Baxter, Forbidden::Strong],
    )
    .is_none()
}

/// Largest pattern [`pattern_occurrences`] counts exactly.
pub const EXACT_PATTERN_CAP: usize = 4;
/// Largest host [`pattern_occurrences`] accepts.
pub const EXACT_HOST_CAP: usize = 2000;
/// Largest pattern [`pattern_density_estimate`] samples.
pub const SAMPLED_PATTERN_CAP: usize = 8;

/// Number of index sets on which `sigma` is order-isomorphic to `pattern`.
/// Exhaustive over all `C(m, |ρ|)` subsets.
pub fn pattern_occurrences(sigma: &Permutation, pattern: &Permutation) -> Result<u64> {
    let k = pattern.len();
    if k > EXACT_PATTERN_CAP || k == 0 {
        return Err(Error::PatternTooLarge {
            len: k,
            cap: EXACT_PATTERN_CAP,
        });
    }
    let m = sigma.len();
    if m > EXACT_HOST_CAP {
        return Err(Error::PatternTooLarge {
            len: m,
            cap: EXACT_HOST_CAP,
        });
    }
    if k > m {
        return Ok(0);
    }
    if k == 1 {
        return Ok(m as u64);
    }
    let v = sigma.values();
    let p = pattern.values();
    let mut idx: Vec<usize> = (0..k).collect();
    let mut count = 0u64;
    let mut vals = vec![0usize; k];
    loop {
        for (slot, &i) in idx.iter().enumerate() {
            vals[slot] = v[i];
        }
        if order_isomorphic(&vals, p) {
            count += 1;
        }
        // next k-subset in lexicographic order
        let mut t = k;
        while t > 0 && idx[t - 1] == m - k + t - 1 {
            t -= 1;
        }
        if t == 0 {
            break;
        }
        idx[t - 1] += 1;
        for s in t..k {
            idx[s] = idx[s - 1] + 1;
        }
    }
    Ok(count)
}

/// True iff `vals` has the same relative order as the pattern `p`.
fn order_isomorphic(vals: &[usize], p: &[usize]) -> bool {
    for a in 0..vals.len() {
        for b in a + 1..vals.len() {
            if (vals[a] < vals[b]) != (p[a] < p[b]) {
                return false;
            }
        }
    }
    true
}

/// A sampled proportion with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityEstimate {
    pub proportion: f64,
    pub std_error: f64,
    pub samples: u64,
}

/// Fraction of `k_samples` uniform index subsets of size `|ρ|` on which
/// `sigma` is order-isomorphic to `pattern`.
pub fn pattern_density_estimate(
    sigma: &Permutation,
    pattern: &Permutation,
    k_samples: u64,
    seed: u64,
) -> Result<DensityEstimate> {
    let k = pattern.len();
    let m = sigma.len();
    if k == 0 || k > SAMPLED_PATTERN_CAP {
        return Err(Error::PatternTooLarge {
            len: k,
            cap: SAMPLED_PATTERN_CAP,
        });
    }
    if k_samples == 0 {
        return Err(Error::InvalidConfig("k_samples must be positive".into()));
    }
    if k > m {
        return Ok(DensityEstimate {
            proportion: 0.0,
            std_error: 0.0,
            samples: k_samples,
        });
    }
    let mut rng = seeded(seed);
    let v = sigma.values();
    let p = pattern.values();
    let mut idx = Vec::with_capacity(k);
    let mut vals = vec![0; k];
    let mut hits = 0u64;
    for _ in 0..k_samples {
        idx.clear();
        // Floyd's algorithm for a uniform k-subset
        for j in m - k..m {
            let t = rng.random_range(0..=j);
            if idx.contains(&t) {
                idx.push(j);
            } else {
                idx.push(t);
            }
        }
        idx.sort_unstable();
        for (slot, &i) in idx.iter().enumerate() {
            vals[slot] = v[i];
        }
        if order_isomorphic(&vals, p) {
            hits += 1;
        }
    }
    let q = hits as f64 / k_samples as f64;
    Ok(DensityEstimate {
        proportion: q,
        std_error: (q * (1.0 - q) / k_samples as f64).sqrt(),
        samples: k_samples,
    })
}

/// Inversion count in `O(m log m)` with a Fenwick tree.
pub fn inversions(sigma: &Permutation) -> u64 {
    let m = sigma.len();
    let mut tree = vec![0u32; m + 1];
    let mut inv = 0u64;
    for (seen, &v) in sigma.values().iter().enumerate() {
        // number of earlier values ≤ v
        let mut below = 0u64;
        let mut i = v;
        while i > 0 {
            below += tree[i] as u64;
            i &= i - 1;
        }
        inv += seen as u64 - below;
        let mut i = v;
        while i <= m {
            tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }
    inv
}

/// Inversions divided by `C(m, 2)`; zero for `m < 2`.
pub fn inversion_density(sigma: &Permutation) -> f64 {
    let m = sigma.len() as f64;
    if m < 2.0 {
        return 0.0;
    }
    inversions(sigma) as f64 / (m * (m - 1.0) / 2.0)
}
