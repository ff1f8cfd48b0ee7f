use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gpbayes::oracle::{single_parameter_table, total_mass};
use gpbayes::{fit, predict, ContinuousDist, SuffStats};
use gpbayes_bench::workloads;

fn bench_fit(c: &mut Criterion) {
    let mut group = c.benchmark_group("fit");
    for w in workloads(1000) {
        group.bench_function(BenchmarkId::new("stats_and_fit", w.name), |b| {
            b.iter(|| fit(&w.spec, &SuffStats::from_data(black_box(&w.data))).unwrap())
        });
    }
    group.finish();
}

fn bench_predictive(c: &mut Criterion) {
    let mut group = c.benchmark_group("predictive");
    for w in workloads(200) {
        let post = fit(&w.spec, &w.stats).unwrap();
        group.bench_function(BenchmarkId::new("build", w.name), |b| {
            b.iter(|| predict(black_box(&post)).unwrap())
        });
        let pred = predict(&post).unwrap();
        group.bench_function(BenchmarkId::new("quantile_0.99", w.name), |b| {
            b.iter(|| pred.inverse_cdf(black_box(0.99)))
        });
    }
    group.finish();
}

fn bench_oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    group.bench_function("single_parameter_table_1e4", |b| {
        b.iter(|| single_parameter_table(black_box(10_000)).unwrap())
    });
    let w = &workloads(200)[0];
    let pred = predict(&fit(&w.spec, &w.stats).unwrap()).unwrap();
    group.bench_function("total_mass", |b| b.iter(|| total_mass(black_box(&pred))));
    group.finish();
}

criterion_group!(benches, bench_fit, bench_predictive, bench_oracle);
criterion_main!(benches);
