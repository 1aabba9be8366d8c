//! The permuton of a finite permutation: `m` squares of side `1/m` on the
//! graph of `σ`, each carrying density `m`.
//!
//! Rectangle masses with dyadic corners are computed exactly. For corners
//! `i/2^D` the overlap of a rectangle side with a grid cell, measured in
//! units of `1/(m 2^D)`, is an integer, so the mass is an integer divided by
//! `m 4^D`.

use std::ops::RangeInclusive;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analytics::lis;
use crate::error::{Error, Result};
use crate::permutation::Permutation;
use crate::rng::{derived_seed, seeded};
use crate::stats::ols;

/// Largest depth for exact dyadic rectangle masses.
pub const EXACT_DEPTH_CAP: u32 = 32;
/// Largest depth for [`box_distance`]; its tables hold `(2^d + 1)^2` entries
/// and the scan costs `8^d`.
pub const BOX_DISTANCE_DEPTH_CAP: u32 = 10;
/// Largest depth for [`box_counting`].
pub const BOX_COUNT_DEPTH_CAP: u32 = 24;

/// Immutable view of `π_σ` with the inverse cached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutonQuery {
    sigma: Permutation,
    inverse: Permutation,
}

impl PermutonQuery {
    pub fn new(sigma: Permutation) -> PermutonQuery {
        let inverse = sigma.inverse();
        PermutonQuery { sigma, inverse }
    }

    pub fn sigma(&self) -> &Permutation {
        &self.sigma
    }

    pub fn size(&self) -> usize {
        self.sigma.len()
    }

    /// Sum over the squares meeting `[x0, x1] × [y0, y1]` of the product of
    /// their overlaps, where a square `j` spans `[(j-1) s, j s]` and all
    /// quantities are integers in a common unit. Walks the narrower axis.
    fn overlap_sum(&self, s: u128, x: (u128, u128), y: (u128, u128)) -> u128 {
        let overlap = |lo: u128, hi: u128, j: usize| -> u128 {
            let (a, b) = ((j as u128 - 1) * s, j as u128 * s);
            hi.min(b).saturating_sub(lo.max(a))
        };
        let (walk, other, perm) = if x.1 - x.0 <= y.1 - y.0 {
            (x, y, &self.sigma)
        } else {
            (y, x, &self.inverse)
        };
        let m = self.size();
        let first = (walk.0 / s) as usize + 1;
        let last = (walk.1.div_ceil(s) as usize).min(m);
        (first..=last)
            .map(|j| overlap(walk.0, walk.1, j) * overlap(other.0, other.1, perm.at(j)))
            .sum()
    }

    /// Exact mass of `[i, j] × [k, l] / 2^depth`.
    pub fn rect_mass_dyadic(&self, depth: u32, i: u64, j: u64, k: u64, l: u64) -> Result<Mass> {
        if depth > EXACT_DEPTH_CAP {
            return Err(Error::DepthTooLarge {
                depth,
                cap: EXACT_DEPTH_CAP,
            });
        }
        let scale = 1u64 << depth;
        if !(i <= j && j <= scale && k <= l && l <= scale) {
            let f = |v: u64| v as f64 / scale as f64;
            return Err(Error::InvalidRectangle {
                a: f(i),
                b: f(j),
                c: f(k),
                d: f(l),
            });
        }
        let m = self.size() as u128;
        if m == 0 {
            return Ok(Mass::new(0, 1));
        }
        // unit 1/(m 2^depth): a corner i/2^depth sits at i·m, a square side is 2^depth
        let num = self.overlap_sum(
            scale as u128,
            (i as u128 * m, j as u128 * m),
            (k as u128 * m, l as u128 * m),
        );
        Ok(Mass::new(num, m << (2 * depth)))
    }

    /// Mass of `[a, b] × [c, d]`, exact when the corners are dyadic with at
    /// most [`EXACT_DEPTH_CAP`] binary digits.
    pub fn rect_mass(&self, a: f64, b: f64, c: f64, d: f64) -> Result<f64> {
        let valid = |lo: f64, hi: f64| (0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi) && lo <= hi;
        if !(valid(a, b) && valid(c, d)) {
            return Err(Error::InvalidRectangle { a, b, c, d });
        }
        let scale = (1u64 << EXACT_DEPTH_CAP) as f64;
        let dyadic = |v: f64| {
            let s = v * scale;
            (s.fract() == 0.0).then_some(s as u64)
        };
        if let (Some(i), Some(j), Some(k), Some(l)) = (dyadic(a), dyadic(b), dyadic(c), dyadic(d)) {
            return Ok(self.rect_mass_dyadic(EXACT_DEPTH_CAP, i, j, k, l)?.to_f64());
        }
        let m = self.size();
        let mf = m as f64;
        let overlap = |lo: f64, hi: f64, j: usize| {
            (hi.min(j as f64 / mf) - lo.max((j - 1) as f64 / mf)).max(0.0)
        };
        let first = ((a * mf).floor() as usize + 1).min(m);
        let last = ((b * mf).ceil() as usize).min(m);
        Ok((first..=last)
            .map(|j| mf * overlap(a, b, j) * overlap(c, d, self.sigma.at(j)))
            .sum())
    }

    /// Masses of the `2^depth × 2^depth` dyadic cells, as integers over
    /// `m 4^depth`, row `x` major.
    fn cell_masses(&self, depth: u32) -> Vec<u128> {
        let side = 1usize << depth;
        let m = self.size() as u128;
        let scale = side as u128;
        let mut cells = vec![0u128; side * side];
        for j in 1..=self.size() {
            // square j spans [(j-1) 2^d, j 2^d] in units of 1/(m 2^d); a cell is m wide
            let span = |v: usize| ((v as u128 - 1) * scale, v as u128 * scale);
            let (x, y) = (span(j), span(self.sigma.at(j)));
            let cells_of = |(lo, hi): (u128, u128)| (lo / m) as usize..=(((hi - 1) / m) as usize);
            for cx in cells_of(x) {
                let ox = x.1.min((cx as u128 + 1) * m) - x.0.max(cx as u128 * m);
                for cy in cells_of(y) {
                    let oy = y.1.min((cy as u128 + 1) * m) - y.0.max(cy as u128 * m);
                    cells[cx * side + cy] += ox * oy;
                }
            }
        }
        cells
    }
}

/// A nonnegative rational in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mass {
    num: u128,
    den: u128,
}

impl Mass {
    pub fn new(num: u128, den: u128) -> Mass {
        assert!(den > 0, "zero denominator");
        let g = gcd(num, den);
        Mass {
            num: num / g,
            den: den / g,
        }
    }

    pub fn numerator(&self) -> u128 {
        self.num
    }

    pub fn denominator(&self) -> u128 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// Largest difference of the masses the two permutons give to a dyadic
/// rectangle `[i, j] × [k, l] / 2^depth`.
///
/// Every pair of column bounds reduces to a one-dimensional maximum
/// subarray over the rows, so the scan costs `8^depth`. The masses are
/// compared exactly.
pub fn box_distance(q1: &PermutonQuery, q2: &PermutonQuery, depth: u32) -> Result<f64> {
    if depth > BOX_DISTANCE_DEPTH_CAP {
        return Err(Error::DepthTooLarge {
            depth,
            cap: BOX_DISTANCE_DEPTH_CAP,
        });
    }
    if depth == 0 {
        return Err(Error::InvalidConfig("depth must be at least 1".into()));
    }
    let (m1, m2) = (q1.size() as i128, q2.size() as i128);
    if m1 == 0 || m2 == 0 {
        return Err(Error::InvalidConfig("empty permutation".into()));
    }
    let side = 1usize << depth;
    // common denominator m1 m2 4^depth
    let (c1, c2) = (q1.cell_masses(depth), q2.cell_masses(depth));
    let diff: Vec<i128> = c1
        .iter()
        .zip(&c2)
        .map(|(&a, &b)| a as i128 * m2 - b as i128 * m1)
        .collect();
    let mut best = 0i128;
    let mut strip = vec![0i128; side];
    for i in 0..side {
        strip.iter_mut().for_each(|v| *v = 0);
        for j in i..side {
            for (cy, v) in strip.iter_mut().enumerate() {
                *v += diff[j * side + cy];
            }
            let (mut run, mut lo, mut hi) = (0i128, 0i128, 0i128);
            for &v in &strip {
                run += v;
                lo = lo.min(run);
                hi = hi.max(run);
                best = best.max(run - lo).max(hi - run);
            }
        }
    }
    let den = (m1 * m2) << (2 * depth);
    Ok(Mass::new(best as u128, den as u128).to_f64())
}

/// `k` i.i.d. points of `π_σ`, reduced to the pattern of their y-ranks in
/// x order. Ties have probability zero and are broken by draw index.
pub fn sample_pattern(q: &PermutonQuery, k: usize, seed: u64) -> Permutation {
    let mut rng = seeded(seed);
    let m = q.size();
    assert!(m > 0 || k == 0, "cannot sample from an empty permuton");
    let mut pts: Vec<(f64, f64)> = (0..k)
        .map(|_| {
            let j = rng.random_range(1..=m);
            let (u, v): (f64, f64) = (rng.random(), rng.random());
            ((j as f64 - 1.0 + u) / m as f64, (q.sigma.at(j) as f64 - 1.0 + v) / m as f64)
        })
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    Permutation::standardize(&ys)
}

/// Occupied cells of the `2^d` grid at one scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxCount {
    pub scale_exponent: u32,
    pub boxes_hit: u64,
    /// Least-squares slope of `log2(boxes_hit)` against `d` over the whole
    /// range the count belongs to.
    pub slope_estimate: f64,
}

/// Counts grid cells containing a point `(i/m, σ(i)/m)`; the point on a
/// cell's upper or right edge belongs to that cell.
pub fn box_counting(q: &PermutonQuery, depths: RangeInclusive<u32>) -> Result<Vec<BoxCount>> {
    let (&lo, &hi) = (depths.start(), depths.end());
    if hi > BOX_COUNT_DEPTH_CAP {
        return Err(Error::DepthTooLarge {
            depth: hi,
            cap: BOX_COUNT_DEPTH_CAP,
        });
    }
    if lo >= hi {
        return Err(Error::InvalidConfig(format!(
            "a slope needs at least two depths, got {lo}..={hi}"
        )));
    }
    let m = q.size() as u64;
    if m == 0 {
        return Err(Error::InvalidConfig("empty permutation".into()));
    }
    let mut cells = Vec::with_capacity(m as usize);
    let counts: Vec<(u32, u64)> = depths
        .map(|d| {
            let cell = |v: usize| ((v as u64) << d).div_ceil(m) - 1;
            cells.clear();
            cells.extend((1..=q.size()).map(|i| (cell(i) << d) | cell(q.sigma.at(i))));
            cells.sort_unstable();
            cells.dedup();
            (d, cells.len() as u64)
        })
        .collect();
    let xs: Vec<f64> = counts.iter().map(|&(d, _)| d as f64).collect();
    let ys: Vec<f64> = counts.iter().map(|&(_, c)| (c as f64).log2()).collect();
    let slope = ols(&xs, &ys).map_or(f64::NAN, |f| f.slope);
    Ok(counts
        .into_iter()
        .map(|(d, c)| BoxCount {
            scale_exponent: d,
            boxes_hit: c,
            slope_estimate: slope,
        })
        .collect())
}

/// `(k, lis(pattern) / k)` for one sampled pattern per `k`; stream `i` uses
/// the seed derived from `seed` and `i`.
pub fn monotone_mass_trend(q: &PermutonQuery, k_values: &[usize], seed: u64) -> Vec<(usize, f64)> {
    k_values
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let p = sample_pattern(q, k, derived_seed(seed, i as u64));
            (k, lis(&p) as f64 / k as f64)
        })
        .collect()
}
