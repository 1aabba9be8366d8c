//! Studies built on the sampler: LIS/LDS scaling, invariance under
//! re-rooting, cyclic displacement, box counting and the small-size
//! uniformity gate.
//!
//! Replicate `r` of a study draws from its own chain seeded with
//! `derived_seed(seed, index)`, so each record can be reproduced alone from
//! the seed it carries. Baseline arms use a disjoint range of indices.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analytics::{inversion_density, lds, lis};
use crate::enumerate::{enumerate_meanders, MEANDER_CAP};
use crate::error::{Error, Result};
use crate::meander::{cyclic_from_meandric, re_root_permutation, Meander};
use crate::permutation::Permutation;
use crate::permuton::{box_counting, PermutonQuery};
use crate::rng::{derived_seed, seeded};
use crate::sampler::{run_chain, sample_meander, uniform_permutation, ChainConfig};
use crate::stats::{chi_square_uniform, ks_two_sample, median, power_law_fit, ChiSquareTest, KsTest, BOOTSTRAP_RESAMPLES};

/// First stream index of baseline arms.
const BASELINE_STREAM: u64 = 1 << 40;
/// Stream of the bootstrap resampler.
const BOOTSTRAP_STREAM: u64 = 1 << 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Statistic {
    #[serde(rename = "LIS")]
    Lis,
    #[serde(rename = "LDS")]
    Lds,
    BoxSlope,
    CyclicDisplacement,
}

impl Statistic {
    pub fn name(self) -> &'static str {
        match self {
            Statistic::Lis => "LIS",
            Statistic::Lds => "LDS",
            Statistic::BoxSlope => "BoxSlope",
            Statistic::CyclicDisplacement => "CyclicDisplacement",
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Statistic> {
        [Statistic::Lis, Statistic::Lds, Statistic::BoxSlope, Statistic::CyclicDisplacement]
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown statistic {s:?}")))
    }
}

/// One measured value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingRecord {
    pub n: usize,
    pub replicate: usize,
    pub statistic: Statistic,
    pub value: f64,
    pub seed: u64,
}

pub const CSV_HEADER: &str = "n,replicate,statistic,value,seed";

impl ScalingRecord {
    /// Checks the value range of the statistic. Box slopes may be negative
    /// only through rounding, which never happens for counts.
    pub fn validate(&self) -> Result<()> {
        let ok = self.value.is_finite()
            && self.value >= 0.0
            && match self.statistic {
                Statistic::Lis | Statistic::Lds => {
                    self.value.fract() == 0.0 && self.value <= 2.0 * self.n as f64
                }
                _ => true,
            };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("record out of range: {self:?}")))
        }
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.n, self.replicate, self.statistic, self.value, self.seed
        )
    }

    pub fn from_csv(line: &str) -> Result<ScalingRecord> {
        let fields: Vec<&str> = line.trim().split(',').collect();
        let [n, replicate, statistic, value, seed] = fields[..] else {
            return Err(Error::Parse(format!("expected 5 fields in {line:?}")));
        };
        let num = |s: &str| Error::Parse(format!("bad number {s:?}"));
        let record = ScalingRecord {
            n: n.parse().map_err(|_| num(n))?,
            replicate: replicate.parse().map_err(|_| num(replicate))?,
            statistic: statistic.parse()?,
            value: value.parse().map_err(|_| num(value))?,
            seed: seed.parse().map_err(|_| num(seed))?,
        };
        record.validate()?;
        Ok(record)
    }
}

pub fn write_csv(out: &mut impl Write, records: &[ScalingRecord]) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{}", r.to_csv())?;
    }
    Ok(())
}

pub fn read_csv(input: impl BufRead) -> Result<Vec<ScalingRecord>> {
    let mut lines = input.lines();
    match lines.next() {
        Some(Ok(h)) if h.trim() == CSV_HEADER => {}
        _ => return Err(Error::Parse(format!("expected header {CSV_HEADER:?}"))),
    }
    lines
        .filter(|l| !matches!(l, Ok(s) if s.trim().is_empty()))
        .map(|l| ScalingRecord::from_csv(&l.map_err(|e| Error::Parse(e.to_string()))?))
        .collect()
}

/// Fit of `log2(mean statistic)` against `log2(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub alpha: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Regresses one statistic of `records`, grouping replicates by `n`.
pub fn regress(records: &[ScalingRecord], statistic: Statistic, seed: u64) -> Result<RegressionResult> {
    let mut groups: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut sorted: Vec<&ScalingRecord> = records.iter().filter(|r| r.statistic == statistic).collect();
    sorted.sort_by_key(|r| (r.n, r.replicate));
    for r in sorted {
        match groups.last_mut() {
            Some((n, vals)) if *n == r.n as f64 => vals.push(r.value),
            _ => groups.push((r.n as f64, vec![r.value])),
        }
    }
    let fit = power_law_fit(&groups, BOOTSTRAP_RESAMPLES, derived_seed(seed, BOOTSTRAP_STREAM))
        .ok_or_else(|| Error::InvalidConfig(format!("cannot regress {statistic}: need two sizes with positive means")))?;
    Ok(RegressionResult {
        alpha: fit.fit.slope,
        intercept: fit.fit.intercept,
        r_squared: fit.fit.r_squared,
        ci_low: fit.ci_low,
        ci_high: fit.ci_high,
    })
}

fn check_sizes(sizes: &[usize], replicates: usize) -> Result<()> {
    if sizes.len() < 2 || sizes.windows(2).any(|w| w[0] >= w[1]) || sizes[0] == 0 {
        return Err(Error::InvalidConfig(format!(
            "sizes must be at least two ascending positive values, got {sizes:?}"
        )));
    }
    if replicates == 0 {
        return Err(Error::InvalidConfig("need at least one replicate".into()));
    }
    Ok(())
}

/// Outcome of [`experiment_lis_scaling`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LisScaling {
    pub lis: RegressionResult,
    pub lds: RegressionResult,
    pub baseline_lis: RegressionResult,
    pub baseline_lds: RegressionResult,
    #[serde(skip)]
    pub records: Vec<ScalingRecord>,
    #[serde(skip)]
    pub baseline_records: Vec<ScalingRecord>,
}

/// LIS and LDS of meandric permutations of sampled meanders of each size
/// `n`, next to uniform permutations of size `2n`.
pub fn experiment_lis_scaling(sizes: &[usize], replicates: usize, seed: u64) -> Result<LisScaling> {
    check_sizes(sizes, replicates)?;
    let mut records = Vec::new();
    let mut baseline_records = Vec::new();
    for (si, &n) in sizes.iter().enumerate() {
        for r in 0..replicates {
            let index = (si * replicates + r) as u64;
            let s = derived_seed(seed, index);
            let sigma = sample_meander(n, s)?.meandric_permutation();
            let b = derived_seed(seed, BASELINE_STREAM + index);
            let base = uniform_permutation(2 * n, b);
            for (stat, f) in [(Statistic::Lis, lis as fn(&Permutation) -> usize), (Statistic::Lds, lds)] {
                records.push(record(n, r, stat, f(&sigma) as f64, s));
                baseline_records.push(record(n, r, stat, f(&base) as f64, b));
            }
        }
    }
    Ok(LisScaling {
        lis: regress(&records, Statistic::Lis, seed)?,
        lds: regress(&records, Statistic::Lds, seed)?,
        baseline_lis: regress(&baseline_records, Statistic::Lis, seed)?,
        baseline_lds: regress(&baseline_records, Statistic::Lds, seed)?,
        records,
        baseline_records,
    })
}

fn record(n: usize, replicate: usize, statistic: Statistic, value: f64, seed: u64) -> ScalingRecord {
    ScalingRecord {
        n,
        replicate,
        statistic,
        value,
        seed,
    }
}

/// Exact check that re-rooting at each `k` permutes the meandric
/// permutations of size `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReRootExact {
    pub n: usize,
    pub meanders: usize,
    pub roots_checked: usize,
    /// Roots at which some image fell outside the set or two images met.
    pub failures: Vec<usize>,
}

pub const RE_ROOT_EXACT_CAP: usize = 6;

pub fn re_root_exact(n: usize) -> Result<ReRootExact> {
    if n > RE_ROOT_EXACT_CAP {
        return Err(Error::SizeTooLarge {
            n,
            cap: RE_ROOT_EXACT_CAP,
        });
    }
    let perms: Vec<Permutation> = enumerate_meanders(n)?.map(|m| m.meandric_permutation()).collect();
    let index: HashMap<&Permutation, usize> = perms.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut failures = Vec::new();
    for k in 1..=2 * n {
        let mut hit = vec![false; perms.len()];
        let ok = perms.iter().all(|p| {
            re_root_permutation(p, k)
                .ok()
                .and_then(|img| index.get(&img).copied())
                .is_some_and(|i| !std::mem::replace(&mut hit[i], true))
        });
        if !ok {
            failures.push(k);
        }
    }
    Ok(ReRootExact {
        n,
        meanders: perms.len(),
        roots_checked: 2 * n,
        failures,
    })
}

/// Two-sample comparison of sampled meanders with re-rooted ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReRootStatistical {
    pub n: usize,
    pub samples_per_arm: usize,
    pub lis: KsTest,
    pub inversion_density: KsTest,
    /// LIS of the plain arm, then of the re-rooted arm.
    #[serde(skip)]
    pub plain: Vec<ScalingRecord>,
    #[serde(skip)]
    pub rooted: Vec<ScalingRecord>,
}

/// Arm one holds `samples` meandric permutations, arm two the same number
/// of independent ones re-rooted at a uniform `k`.
pub fn re_root_statistical(n: usize, samples: usize, seed: u64) -> Result<ReRootStatistical> {
    if samples == 0 {
        return Err(Error::InvalidConfig("need at least one sample".into()));
    }
    let mut plain = (Vec::new(), Vec::new());
    let mut rooted = (Vec::new(), Vec::new());
    let mut records = (Vec::new(), Vec::new());
    let mut pick = seeded(derived_seed(seed, BASELINE_STREAM));
    for i in 0..2 * samples {
        let s = derived_seed(seed, i as u64);
        let sigma = sample_meander(n, s)?.meandric_permutation();
        let (arm, out, sigma) = if i < samples {
            (&mut plain, &mut records.0, sigma)
        } else {
            let k = rand::Rng::random_range(&mut pick, 1..=2 * n);
            (&mut rooted, &mut records.1, re_root_permutation(&sigma, k)?)
        };
        let l = lis(&sigma);
        arm.0.push(l as f64);
        arm.1.push(inversion_density(&sigma));
        out.push(record(n, i % samples, Statistic::Lis, l as f64, s));
    }
    Ok(ReRootStatistical {
        n,
        samples_per_arm: samples,
        lis: ks_two_sample(&plain.0, &rooted.0, 0.01),
        inversion_density: ks_two_sample(&plain.1, &rooted.1, 0.01),
        plain: records.0,
        rooted: records.1,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReRootReport {
    pub exact: Option<ReRootExact>,
    pub statistical: ReRootStatistical,
}

/// The exact part when `n` allows it, and the statistical part.
pub fn experiment_rr_invariance(n: usize, samples: usize, seed: u64) -> Result<ReRootReport> {
    let exact = if n <= RE_ROOT_EXACT_CAP { Some(re_root_exact(n)?) } else { None };
    Ok(ReRootReport {
        exact,
        statistical: re_root_statistical(n, samples, seed)?,
    })
}

/// `mean_j d(τ(j), j) / 2n` with `d` the cyclic distance on `2n` points.
pub fn cyclic_displacement(tau: &Permutation) -> f64 {
    let m = tau.len();
    let total: usize = (1..=m)
        .map(|j| {
            let d = tau.at(j).abs_diff(j);
            d.min(m - d)
        })
        .sum();
    total as f64 / (m * m) as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CyclicReport {
    /// `(n, median displacement)` in the order of the sizes.
    pub medians: Vec<(usize, f64)>,
    pub decreasing: bool,
    #[serde(skip)]
    pub records: Vec<ScalingRecord>,
}

pub fn experiment_cyclic_displacement(sizes: &[usize], replicates: usize, seed: u64) -> Result<CyclicReport> {
    check_sizes(sizes, replicates)?;
    let mut records = Vec::new();
    let mut medians = Vec::new();
    for (si, &n) in sizes.iter().enumerate() {
        let mut vals = Vec::with_capacity(replicates);
        for r in 0..replicates {
            let s = derived_seed(seed, (si * replicates + r) as u64);
            let sigma = sample_meander(n, s)?.meandric_permutation();
            let v = cyclic_displacement(&cyclic_from_meandric(&sigma)?);
            vals.push(v);
            records.push(record(n, r, Statistic::CyclicDisplacement, v, s));
        }
        medians.push((n, median(&vals)));
    }
    let decreasing = medians.windows(2).all(|w| w[1].1 < w[0].1);
    Ok(CyclicReport {
        medians,
        decreasing,
        records,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxcountReport {
    pub n: usize,
    pub depths: (u32, u32),
    /// Replicates with identity slope < meandric slope < uniform slope.
    pub ordered: usize,
    pub replicates: usize,
    #[serde(skip)]
    pub meandric: Vec<ScalingRecord>,
    #[serde(skip)]
    pub uniform: Vec<ScalingRecord>,
    #[serde(skip)]
    pub identity: Vec<ScalingRecord>,
}

/// Box-count slopes over `depths` of the meandric permutation of sampled
/// meanders of size `n`, with uniform and identity permutations of size
/// `2n` as controls.
pub fn experiment_boxcount(n: usize, depths: (u32, u32), replicates: usize, seed: u64) -> Result<BoxcountReport> {
    if replicates == 0 {
        return Err(Error::InvalidConfig("need at least one replicate".into()));
    }
    if (2 * n as u128) < 1u128 << (2 * depths.1.min(63)) {
        return Err(Error::InvalidConfig(format!(
            "{} points cannot resolve depth {}",
            2 * n,
            depths.1
        )));
    }
    let slope = |p: Permutation| -> Result<f64> {
        Ok(box_counting(&PermutonQuery::new(p), depths.0..=depths.1)?[0].slope_estimate)
    };
    let id_slope = slope(Permutation::identity(2 * n))?;
    let mut report = BoxcountReport {
        n,
        depths,
        ordered: 0,
        replicates,
        meandric: Vec::new(),
        uniform: Vec::new(),
        identity: Vec::new(),
    };
    for r in 0..replicates {
        let s = derived_seed(seed, r as u64);
        let b = derived_seed(seed, BASELINE_STREAM + r as u64);
        let mer = slope(sample_meander(n, s)?.meandric_permutation())?;
        let uni = slope(uniform_permutation(2 * n, b))?;
        if id_slope < mer && mer < uni {
            report.ordered += 1;
        }
        report.meandric.push(record(n, r, Statistic::BoxSlope, mer, s));
        report.uniform.push(record(n, r, Statistic::BoxSlope, uni, b));
        report.identity.push(record(n, r, Statistic::BoxSlope, id_slope, 0));
    }
    Ok(report)
}

/// Chi-square test of the visit counts of one chain against the uniform law
/// on all meanders of size `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformityReport {
    pub n: usize,
    pub cells: usize,
    pub emitted: u64,
    pub visited: usize,
    pub test: ChiSquareTest,
}

pub fn experiment_uniformity(n: usize, steps: u64, thin: u64, seed: u64) -> Result<UniformityReport> {
    if n > MEANDER_CAP {
        return Err(Error::SizeTooLarge { n, cap: MEANDER_CAP });
    }
    let all: Vec<Meander> = enumerate_meanders(n)?.collect();
    if all.len() < 2 {
        return Err(Error::InvalidConfig(format!("only {} meander of size {n}", all.len())));
    }
    let index: HashMap<&Meander, usize> = all.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let cfg = ChainConfig {
        n,
        steps,
        burn_in: 0,
        thin,
        seed,
    };
    let mut counts = vec![0u64; all.len()];
    for m in run_chain(&cfg)? {
        counts[index[&m]] += 1;
    }
    Ok(UniformityReport {
        n,
        cells: all.len(),
        emitted: cfg.emitted(),
        visited: counts.iter().filter(|&&c| c > 0).count(),
        test: chi_square_uniform(&counts),
    })
}
