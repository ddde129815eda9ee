//! Batch-census throughput: rayon fan-out against the sequential reference,
//! plus the single-structure kernels that dominate a sweep.

use std::hint::black_box;

use bismut_core::catalog;
use bismut_core::identities::identity_suite;
use bismut_core::metric::point_report;
use bismut_core::par;
use bismut_core::structure::LieHermitianStructure;
use bismut_core::{check_all, Cx};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

/// Deterministic mixed-family workload of the given size.
fn workload(count: usize) -> Vec<LieHermitianStructure> {
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let t = i as f64 * 0.37;
        out.push(match i % 3 {
            0 => catalog::family_c(Cx::new(t.cos(), 0.5 * t.sin()), Cx::new(0.3, -t.sin())),
            1 => catalog::nilmanifold_b(Cx::new(t.cos(), 1.0 + t.sin())),
            _ => catalog::family_a(t.cos(), t.sin()),
        });
    }
    out
}

fn bench_census(c: &mut Criterion) {
    let mut group = c.benchmark_group("census");
    group.sample_size(10);
    for size in [64usize, 256] {
        let items = workload(size);
        group.throughput(Throughput::Elements(size as u64));
        group.bench_with_input(BenchmarkId::new("parallel", size), &items, |b, items| {
            b.iter(|| par::census(black_box(items), 1e-9));
        });
        group.bench_with_input(BenchmarkId::new("sequential", size), &items, |b, items| {
            b.iter(|| par::census_seq(black_box(items), 1e-9));
        });
    }
    group.finish();
}

fn bench_kernels(c: &mut Criterion) {
    let s = catalog::so3c();
    c.bench_function("check_all/so3c", |b| {
        b.iter(|| check_all(black_box(&s), 1e-9).unwrap());
    });
    c.bench_function("identity_suite/so3c", |b| {
        b.iter(|| identity_suite(black_box(&s), 1e-9).unwrap());
    });
    let w = catalog::wallach();
    c.bench_function("point_report/wallach", |b| {
        b.iter(|| point_report(black_box(&w), 1e-9).unwrap());
    });
}

criterion_group!(benches, bench_census, bench_kernels);
criterion_main!(benches);
