use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use drgspin::central::build_z;
use drgspin::spin::{boltzmann_pair, star_triangle_residual, FMode};
use drgspin::{analyze, cycle_graph, identity_harness, scan, spectral_data, AnalyzeOptions, GridSpec};
use drgspin_bench::cycle_fixture;
use std::hint::black_box;

fn spectral(c: &mut Criterion) {
    let mut group = c.benchmark_group("spectral_data");
    for n in [7, 13, 21] {
        let g = cycle_graph(n).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| b.iter(|| spectral_data(black_box(g)).unwrap()));
    }
    group.finish();
}

fn central(c: &mut Criterion) {
    let f = cycle_fixture(13);
    c.bench_function("build_z/13", |b| b.iter(|| build_z(&f.g, &f.s, &f.ds, &f.p, 1e-8).unwrap()));
}

fn star_triangle(c: &mut Criterion) {
    let mut group = c.benchmark_group("star_triangle");
    for n in [7, 13, 21] {
        let f = cycle_fixture(n);
        let bp = boltzmann_pair(&f.g, &f.s, &f.ds, &f.p, FMode::Theorem).unwrap();
        let factor = bp.star_factor();
        group.bench_with_input(BenchmarkId::from_parameter(n), &bp.w, |b, w| {
            b.iter(|| star_triangle_residual(black_box(w), factor).unwrap())
        });
    }
    group.finish();
}

fn pipeline(c: &mut Criterion) {
    let g = cycle_graph(7).unwrap();
    let opts = AnalyzeOptions::default();
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    group.bench_function("analyze/7", |b| b.iter(|| analyze(&g, "c7", &opts)));
    group.bench_function("identity_harness/D4x100", |b| b.iter(|| identity_harness(4, 100, 1)));
    let spec = GridSpec { real_q: None, ..GridSpec::defaults(3) };
    group.bench_function("scan/D3_unit_circle", |b| b.iter(|| scan(3, &spec).unwrap()));
    group.finish();
}

criterion_group!(benches, spectral, central, star_triangle, pipeline);
criterion_main!(benches);
