use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_bigint::BigInt;
use num_rational::BigRational;
use ulam_core::advice::{make_truth_oracle, AdviceOracle, ErrorPolicy, Truth};
use ulam_core::bounds::{find_capacity, partial_binomial_sum, QueryBudget};
use ulam_core::games::{continuous_search, identify, min_cyclic, play_search, SearchStrategy};

fn partial_sums(c: &mut Criterion) {
    c.bench_function("partial_sums_n64", |b| {
        b.iter(|| (0..=64u64).map(|m| partial_binomial_sum(black_box(64), m).unwrap().bits()).sum::<u64>())
    });
}

fn identify_sessions(c: &mut Criterion) {
    let mut group = c.benchmark_group("identify_greedy");
    for (k, h) in [(10, 1), (20, 2), (40, 3)] {
        let budget = QueryBudget::new(k, h).unwrap();
        let m = u64::try_from(find_capacity(budget)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(format!("k{k}_H{h}")), &m, |b, &m| {
            b.iter(|| {
                let mut o = AdviceOracle::new(Truth::Index(m / 2 + 1), budget, ErrorPolicy::Greedy).unwrap();
                identify(black_box(m), budget, &mut o).unwrap().output
            })
        });
    }
    group.finish();
}

fn continuous(c: &mut Criterion) {
    let budget = QueryBudget::new(16, 2).unwrap();
    let x = BigRational::new(BigInt::from(1), BigInt::from(3));
    c.bench_function("continuous_k16_H2", |b| {
        b.iter(|| {
            let mut o = make_truth_oracle(Truth::Real(x.clone()), budget);
            continuous_search(budget, &mut o).unwrap().output.consistent_measure
        })
    });
}

fn cyclic_and_search(c: &mut Criterion) {
    let budget = QueryBudget::new(8, 2).unwrap();
    c.bench_function("min_cyclic_n256_k8_H2", |b| {
        b.iter(|| {
            let mut o = AdviceOracle::new(Truth::Index(100), budget, ErrorPolicy::Greedy).unwrap();
            min_cyclic(black_box(256), budget, &mut o).unwrap().output
        })
    });
    let budget = QueryBudget::new(6, 1).unwrap();
    c.bench_function("search_adversary_n64_k6_H1", |b| {
        b.iter(|| play_search(black_box(64), budget, SearchStrategy::ComparisonWeighting).unwrap().output)
    });
}

criterion_group!(benches, partial_sums, identify_sessions, continuous, cyclic_and_search);
criterion_main!(benches);
