//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! `cargo test -p meandric --test acceptance` runs everything; numeric
//! arguments after `--` select criteria, e.g. `-- 5 8`.

use std::collections::HashSet;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use meandric::analytics::{lds, lis};
use meandric::enumerate::{catalan, enumerate_meanders, noncrossing_matchings};
use meandric::experiments::{
    experiment_boxcount, experiment_cyclic_displacement, experiment_lis_scaling, experiment_uniformity, re_root_exact,
};
use meandric::meander::{
    cyclic_from_meandric, is_meandric, meander_from_permutation, meandric_from_cyclic, re_root_permutation,
};
use meandric::permuton::{box_distance, Mass, PermutonQuery};
use meandric::rng::{derived_seed, seeded};
use meandric::sampler::{uniform_permutation, MeanderChain};
use meandric::stats::mean;
use meandric::Permutation;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn counts() -> Outcome {
    let start = Instant::now();
    let got: Vec<usize> = (1..=5).map(|n| enumerate_meanders(n).unwrap().count()).collect();
    let elapsed = start.elapsed();
    let mut recurrence = vec![1u64];
    for n in 1..=10 {
        recurrence.push((0..n).map(|i| recurrence[i] * recurrence[n - 1 - i]).sum());
    }
    let catalan_ok = (1..=10).all(|n| catalan(n) == recurrence[n] && noncrossing_matchings(n).count() as u64 == recurrence[n]);
    check(
        got == [1, 2, 8, 42, 262] && elapsed < Duration::from_secs(10) && catalan_ok,
        format!("meanders {got:?} in {elapsed:.2?}, Catalan recurrence to n=10 {catalan_ok}"),
    )
}

fn round_trips() -> Outcome {
    let mut objects = 0;
    let mut failures = 0;
    for n in 1..=6 {
        let mut seen = HashSet::new();
        for m in enumerate_meanders(n).unwrap() {
            objects += 1;
            let sigma = m.meandric_permutation();
            let back = meander_from_permutation(&sigma).ok();
            let tau = cyclic_from_meandric(&sigma).unwrap();
            let sigma2 = meandric_from_cyclic(&tau).ok();
            if back.as_ref() != Some(&m) || sigma2.as_ref() != Some(&sigma) || !is_meandric(&sigma) || !seen.insert(sigma) {
                failures += 1;
            }
        }
    }
    check(failures == 0, format!("{objects} meanders for n <= 6, {failures} failures"))
}

fn worked_example() -> Outcome {
    let sigma: Permutation = "1,4,3,2,5,12,7,8,9,10,11,6".parse().unwrap();
    let want: Permutation = "1,8,9,10,11,12,7,2,5,4,3,6".parse().unwrap();
    let got = re_root_permutation(&sigma, 6).unwrap();
    let tau = cyclic_from_meandric(&sigma).unwrap();
    check(
        got == want && tau.at(1) == 4 && tau.at(6) == 1,
        format!("re-rooted at 6: {:?}, tau(1) = {}, tau(6) = {}", got.values(), tau.at(1), tau.at(6)),
    )
}

fn re_rooting() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for n in 1..=5 {
        let r = re_root_exact(n).unwrap();
        ok &= r.failures.is_empty() && r.roots_checked == 2 * n;
        details.push(format!("n={n}: {} roots, {} failures", r.roots_checked, r.failures.len()));
    }
    check(ok, details.join("; "))
}

fn uniformity() -> Outcome {
    let start = Instant::now();
    let report = experiment_uniformity(4, 100_000, 10, 41).unwrap();
    let all: Vec<_> = enumerate_meanders(4).unwrap().collect();
    let mut worst = 0u64;
    let mut stuck = 0;
    for (i, m) in all.iter().enumerate() {
        let mut chain = MeanderChain::from_meander(m, derived_seed(42, i as u64));
        let mut seen = HashSet::new();
        seen.insert(chain.meandric_permutation());
        while seen.len() < all.len() && chain.step_index() < 1_000_000 {
            if chain.step() {
                seen.insert(chain.meandric_permutation());
            }
        }
        if seen.len() < all.len() {
            stuck += 1;
        }
        worst = worst.max(chain.step_index());
    }
    let elapsed = start.elapsed();
    check(
        report.test.p_value >= 0.01 && report.visited == 42 && stuck == 0 && elapsed < Duration::from_secs(60),
        format!(
            "chi-square {:.1} on {} dof, p = {:.3}; all 42 reached from every start, slowest after {worst} steps; {elapsed:.2?}",
            report.test.statistic, report.test.dof, report.test.p_value
        ),
    )
}

/// Longest increasing subsequence by enumerating every increasing
/// subsequence.
fn lis_brute(values: &[usize]) -> usize {
    fn go(values: &[usize], last: usize) -> usize {
        let mut best = 0;
        for (i, &v) in values.iter().enumerate() {
            if v > last {
                best = best.max(1 + go(&values[i + 1..], v));
            }
        }
        best
    }
    go(values, 0)
}

fn lds_brute(values: &[usize]) -> usize {
    let m = values.len();
    let flipped: Vec<usize> = values.iter().map(|&v| m + 1 - v).collect();
    lis_brute(&flipped)
}

fn lis_engine() -> Outcome {
    let mut cases = 0u64;
    let mut mismatches = 0u64;
    let mut es_failures = 0u64;
    let mut verify = |values: Vec<usize>| {
        let p = Permutation::new(values).unwrap();
        let (a, d) = (lis(&p), lds(&p));
        cases += 1;
        if a != lis_brute(p.values()) || d != lds_brute(p.values()) {
            mismatches += 1;
        }
        if a * d < p.len() {
            es_failures += 1;
        }
    };
    for m in 1..=10 {
        let mut values: Vec<usize> = (1..=m).collect();
        // Heap's algorithm
        let mut c = vec![0usize; m];
        verify(values.clone());
        let mut i = 0;
        while i < m {
            if c[i] < i {
                values.swap(if i % 2 == 0 { 0 } else { c[i] }, i);
                verify(values.clone());
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
    }
    let mut rng = seeded(61);
    for k in 0..1000u64 {
        let m = rng.random_range(1..=15);
        verify(uniform_permutation(m, derived_seed(62, k)).into_values());
    }
    let n = 10_000;
    let lis_mean = mean(&(0..200).map(|k| lis(&uniform_permutation(n, derived_seed(63, k))) as f64).collect::<Vec<_>>());
    let target = 2.0 * (n as f64).sqrt();
    check(
        mismatches == 0 && es_failures == 0 && (lis_mean - target).abs() <= 0.1 * target,
        format!("{cases} cases, {mismatches} mismatches, {es_failures} Erdos-Szekeres failures; mean LIS at n = 10^4 is {lis_mean:.1} vs {target}"),
    )
}

fn lis_scaling() -> Outcome {
    let start = Instant::now();
    let r = experiment_lis_scaling(&[128, 256, 512, 1024, 2048], 30, 71).unwrap();
    let inside = |a: f64, lo: f64, hi: f64| (lo..=hi).contains(&a);
    check(
        inside(r.lis.alpha, 0.60, 0.78)
            && inside(r.lds.alpha, 0.60, 0.78)
            && inside(r.baseline_lis.alpha, 0.45, 0.55)
            && inside(r.baseline_lds.alpha, 0.45, 0.55),
        format!(
            "meandric LIS {:.3} [{:.3}, {:.3}], LDS {:.3} [{:.3}, {:.3}]; uniform LIS {:.3}, LDS {:.3}; {:.0?}",
            r.lis.alpha,
            r.lis.ci_low,
            r.lis.ci_high,
            r.lds.alpha,
            r.lds.ci_low,
            r.lds.ci_high,
            r.baseline_lis.alpha,
            r.baseline_lds.alpha,
            start.elapsed()
        ),
    )
}

fn permuton_exactness() -> Outcome {
    let mut rng = seeded(81);
    let mut checked = 0u64;
    let mut failures = 0u64;
    let mut self_distance = 0.0f64;
    for k in 0..100u64 {
        let m = rng.random_range(1..=512);
        let q = PermutonQuery::new(uniform_permutation(m, derived_seed(82, k)));
        for depth in 0..=8u32 {
            let scale = 1u64 << depth;
            for i in 0..=scale {
                for j in i..=scale {
                    let want = Mass::new((j - i) as u128, scale as u128);
                    checked += 2;
                    if q.rect_mass_dyadic(depth, i, j, 0, scale).unwrap() != want {
                        failures += 1;
                    }
                    if q.rect_mass_dyadic(depth, 0, scale, i, j).unwrap() != want {
                        failures += 1;
                    }
                }
            }
        }
        let f = |v: u64| v as f64 / 256.0;
        let (a, b) = (rng.random_range(0..=256u64), rng.random_range(0..=256u64));
        let (a, b) = (a.min(b), a.max(b));
        checked += 1;
        if q.rect_mass(f(a), f(b), 0.0, 1.0).unwrap() != f(b) - f(a) {
            failures += 1;
        }
        self_distance = self_distance.max(box_distance(&q, &q, 1 + (k % 6) as u32).unwrap());
    }
    check(
        failures == 0 && self_distance == 0.0,
        format!("{checked} marginal identities, {failures} failures; max box_distance(q, q) = {self_distance}"),
    )
}

fn dimension_contrast() -> Outcome {
    let start = Instant::now();
    let r = experiment_boxcount(4096, (3, 6), 50, 91).unwrap();
    let mut passing = 0;
    for ((id, mer), uni) in r.identity.iter().zip(&r.meandric).zip(&r.uniform) {
        if (id.value - 1.0).abs() <= 0.05 && (uni.value - 2.0).abs() <= 0.15 && id.value < mer.value && mer.value < uni.value {
            passing += 1;
        }
    }
    let slopes = |v: &[meandric::ScalingRecord]| mean(&v.iter().map(|r| r.value).collect::<Vec<_>>());
    check(
        passing >= 45,
        format!(
            "{passing}/50 replicates pass; mean slopes identity {:.3}, meandric {:.3}, uniform {:.3}; {:.0?}",
            slopes(&r.identity),
            slopes(&r.meandric),
            slopes(&r.uniform),
            start.elapsed()
        ),
    )
}

fn cyclic_displacement() -> Outcome {
    let start = Instant::now();
    let mut decreasing = 0;
    let mut first = Vec::new();
    for batch in 0..10 {
        let r = experiment_cyclic_displacement(&[128, 256, 512, 1024], 9, derived_seed(101, batch * 1000)).unwrap();
        if r.decreasing {
            decreasing += 1;
        }
        if batch == 0 {
            first = r.medians.iter().map(|&(_, v)| format!("{v:.4}")).collect();
        }
    }
    check(
        decreasing >= 8,
        format!(
            "{decreasing}/10 batches decreasing; first batch medians {}; {:.0?}",
            first.join(" > "),
            start.elapsed()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("oracle counts", counts),
        ("bijection round trips", round_trips),
        ("worked re-rooting example", worked_example),
        ("re-rooting bijectivity", re_rooting),
        ("chain uniformity at n = 4", uniformity),
        ("LIS engine", lis_engine),
        ("LIS scaling exponents", lis_scaling),
        ("permuton exactness", permuton_exactness),
        ("dimension contrast", dimension_contrast),
        ("cyclic displacement", cyclic_displacement),
    ];
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let number = i + 1;
        if !selected.is_empty() && !selected.contains(&number) {
            continue;
        }
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {number}: PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {number}: FAIL {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
