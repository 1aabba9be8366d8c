use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use meandric::analytics::lis;
use meandric::enumerate::enumerate_meanders;
use meandric::permuton::{box_counting, PermutonQuery};
use meandric::sampler::uniform_permutation;
use meandric_bench::warm_chain;

fn chain_steps(c: &mut Criterion) {
    for n in [256, 2048] {
        let mut chain = warm_chain(n, 1);
        c.bench_function(&format!("chain 1000 steps n={n}"), |b| b.iter(|| chain.run(black_box(1000))));
    }
}

fn statistics(c: &mut Criterion) {
    let p = uniform_permutation(10_000, 2);
    c.bench_function("lis m=10000", |b| b.iter(|| lis(black_box(&p))));
    c.bench_function("box counting m=8192 depths 3..6", |b| {
        b.iter_batched(
            || PermutonQuery::new(uniform_permutation(8192, 3)),
            |q| box_counting(&q, 3..=6).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

fn enumeration(c: &mut Criterion) {
    c.bench_function("enumerate meanders n=5", |b| b.iter(|| enumerate_meanders(black_box(5)).unwrap().count()));
}

criterion_group!(benches, chain_steps, statistics, enumeration);
criterion_main!(benches);
