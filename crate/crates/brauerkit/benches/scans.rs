//! Criterion comparison of the rayon-parallel scans against their
//! sequential twins. Build with the default features so both paths are
//! available; the public API dispatches to the parallel one.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use brauerkit::ec::{self, WeierstrassCurve};
use brauerkit::local::{self, DiagonalForm};

fn bench_trace_scan(c: &mut Criterion) {
    let e = WeierstrassCurve::e67();
    let mut group = c.benchmark_group("trace_scan");
    for bound in [500u64, 2000] {
        group.bench_with_input(BenchmarkId::new("parallel", bound), &bound, |b, &bound| {
            b.iter(|| ec::trace_scan(black_box(&e), bound).unwrap())
        });
        group.bench_with_input(
            BenchmarkId::new("sequential", bound),
            &bound,
            |b, &bound| b.iter(|| ec::trace_scan_seq(black_box(&e), bound).unwrap()),
        );
    }
    group.finish();
}

fn bench_point_search(c: &mut Criterion) {
    let e = WeierstrassCurve::e67();
    let twist = e.quadratic_twist(&num_bigint::BigInt::from(2)).unwrap();
    let mut group = c.benchmark_group("rational_point_search");
    group.sample_size(10);
    for bound in [200u64, 1000] {
        group.bench_with_input(BenchmarkId::new("parallel", bound), &bound, |b, &bound| {
            b.iter(|| ec::search_rational_points(black_box(&twist), bound).unwrap())
        });
        group.bench_with_input(
            BenchmarkId::new("sequential", bound),
            &bound,
            |b, &bound| {
                b.iter(|| ec::search_rational_points_seq(black_box(&twist), bound).unwrap())
            },
        );
    }
    group.finish();
}

fn bench_local_solvers(c: &mut Criterion) {
    // single-threaded baselines of the exact arithmetic kernels
    let mut group = c.benchmark_group("local_kernels");
    let phi = DiagonalForm::from_ints(&[-778032, 1, 1, 1]);
    group.bench_function("anisotropic_places_rank4", |b| {
        b.iter(|| local::anisotropic_places(black_box(&phi)).unwrap())
    });
    group.bench_function("isotropic_vector_rank4_h100", |b| {
        b.iter(|| local::find_isotropic_vector(black_box(&phi), 100))
    });
    group.finish();
}

criterion_group!(benches, bench_trace_scan, bench_point_search, bench_local_solvers);
criterion_main!(benches);
