//! Small statistical tools used by the sampler gates and the experiments.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::rng::seeded;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson's test of `counts` against equal cell probabilities.
pub fn chi_square_uniform(counts: &[u64]) -> ChiSquareTest {
    assert!(counts.len() >= 2, "need at least two cells");
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    let statistic = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let dof = counts.len() - 1;
    let p_value = ChiSquared::new(dof as f64)
        .expect("positive degrees of freedom")
        .sf(statistic);
    ChiSquareTest {
        statistic,
        dof,
        p_value,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsTest {
    pub statistic: f64,
    pub p_value: f64,
    /// Rejection threshold for the statistic at the level it was asked for.
    pub critical: f64,
}

/// Two-sample Kolmogorov–Smirnov test with the asymptotic distribution.
pub fn ks_two_sample(a: &[f64], b: &[f64], alpha: f64) -> KsTest {
    assert!(!a.is_empty() && !b.is_empty(), "empty sample");
    let sorted = |xs: &[f64]| {
        let mut v = xs.to_vec();
        v.sort_by(f64::total_cmp);
        v
    };
    let (a, b) = (sorted(a), sorted(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = na * nb / (na + nb);
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    KsTest {
        statistic: d,
        p_value: kolmogorov_sf(lambda),
        critical: (-(alpha / 2.0).ln() / 2.0).sqrt() / ne.sqrt(),
    }
}

/// `P(K > lambda)` for the Kolmogorov distribution.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares fit of `ys` against `xs`.
pub fn ols(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Some(LineFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len() / 2;
    if v.len() % 2 == 1 {
        v[k]
    } else {
        (v[k - 1] + v[k]) / 2.0
    }
}

/// Fit of `log2(mean value)` against `log2(size)` for grouped replicates,
/// with a percentile bootstrap interval for the slope that resamples
/// replicates within each group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub fit: LineFit,
    pub ci_low: f64,
    pub ci_high: f64,
}

pub const BOOTSTRAP_RESAMPLES: usize = 1000;

pub fn power_law_fit(groups: &[(f64, Vec<f64>)], resamples: usize, seed: u64) -> Option<PowerFit> {
    if groups.iter().any(|(size, vals)| vals.is_empty() || *size <= 0.0) {
        return None;
    }
    let xs: Vec<f64> = groups.iter().map(|(size, _)| size.log2()).collect();
    let fit_means = |means: &[f64]| -> Option<LineFit> {
        if means.iter().any(|&m| m <= 0.0) {
            return None;
        }
        let ys: Vec<f64> = means.iter().map(|m| m.log2()).collect();
        ols(&xs, &ys)
    };
    let means: Vec<f64> = groups.iter().map(|(_, v)| mean(v)).collect();
    let fit = fit_means(&means)?;
    let mut rng = seeded(seed);
    let mut slopes = Vec::with_capacity(resamples);
    let mut resampled = vec![0.0; groups.len()];
    for _ in 0..resamples {
        for (slot, (_, v)) in resampled.iter_mut().zip(groups) {
            let total: f64 = (0..v.len()).map(|_| v[rng.random_range(0..v.len())]).sum();
            *slot = total / v.len() as f64;
        }
        if let Some(f) = fit_means(&resampled) {
            slopes.push(f.slope);
        }
    }
    let (mut lo, mut hi) = (fit.slope, fit.slope);
    if !slopes.is_empty() {
        slopes.sort_by(f64::total_cmp);
        let at = |q: f64| slopes[((slopes.len() - 1) as f64 * q).round() as usize];
        // the percentile interval need not contain the point estimate
        lo = at(0.025).min(fit.slope);
        hi = at(0.975).max(fit.slope);
    }
    Some(PowerFit {
        fit,
        ci_low: lo,
        ci_high: hi,
    })
}
