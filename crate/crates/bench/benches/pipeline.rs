use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rmhsbm::estimation::{bic_delta, llr_global};
use rmhsbm::hierarchy::{build_parameter_groups, presets};
use rmhsbm::numeric::{chi2_sf, f_sf};
use rmhsbm::sampling::{sample_block_summary, sample_conditional_sbm};
use rmhsbm::testing::run_tests;
use rmhsbm::{Method, Seed};
use rmhsbm_bench::desk;

fn hierarchy(c: &mut Criterion) {
    let spec = presets::bnu1(200);
    c.bench_function("groups/bnu1", |b| b.iter(|| build_parameter_groups(black_box(&spec))));
}

fn sampling(c: &mut Criterion) {
    let f = desk(20, 1, 1);
    c.bench_function("sample/dyads_14x20", |b| {
        b.iter(|| sample_conditional_sbm(&f.model, &f.membership, black_box(Seed::new(2))).unwrap())
    });
    c.bench_function("sample/summary_14x20", |b| {
        b.iter(|| sample_block_summary(&f.model, black_box(Seed::new(2))).unwrap())
    });
}

fn estimation(c: &mut Criterion) {
    let f = desk(20, 1, 1);
    let summary = &f.population[0];
    c.bench_function("llr/global_14x20", |b| b.iter(|| llr_global(black_box(summary), &f.groups).unwrap()));
    c.bench_function("bic/14x20", |b| b.iter(|| bic_delta(black_box(summary), &f.groups).unwrap()));
}

fn testing(c: &mut Criterion) {
    let f = desk(20, 10, 1);
    let mut group = c.benchmark_group("tests_14x20_s10");
    for method in Method::ALL {
        group.bench_function(method.as_str(), |b| {
            b.iter(|| run_tests(black_box(&f.population), &f.groups, method, 0.05).unwrap())
        });
    }
    group.finish();
}

fn numeric(c: &mut Criterion) {
    c.bench_function("numeric/chi2_sf", |b| b.iter(|| chi2_sf(black_box(37.5), black_box(20)).unwrap()));
    c.bench_function("numeric/f_sf", |b| b.iter(|| f_sf(black_box(2.3), black_box(4.0), black_box(45.0)).unwrap()));
}

criterion_group!(benches, hierarchy, sampling, estimation, testing, numeric);
criterion_main!(benches);
