use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use nonoverlap::elliptic::{carlson_rf, carlson_rj, ellip_pi};
use nonoverlap::quad::{quad_singular, Endpoint};
use nonoverlap::reduction::full_residual;
use nonoverlap::tracer::{seed_search, SeedGrid, SolverOptions};
use nonoverlap::BranchChoice;
use nonoverlap_bench::{c, carlson_args, problem, ratio, seed_point};

fn elliptic(cr: &mut Criterion) {
    let [plain, shifted] = carlson_args();
    cr.bench_function("carlson_rf", |b| {
        b.iter(|| carlson_rf(black_box(plain.0), black_box(plain.1), black_box(plain.2)))
    });
    cr.bench_function("carlson_rj", |b| {
        b.iter(|| carlson_rj(black_box(plain.0), plain.1, plain.2, plain.3))
    });
    cr.bench_function("carlson_rj_shifted", |b| {
        b.iter(|| carlson_rj(black_box(shifted.0), shifted.1, shifted.2, shifted.3))
    });
    cr.bench_function("ellip_pi", |b| {
        b.iter(|| ellip_pi(black_box(c(0.7, 0.2)), c(-0.4, 0.3), c(0.6, -0.1)))
    });
}

fn quadrature(cr: &mut Criterion) {
    // K(0.5) from its defining integral over [0, 1]
    let k2 = 0.25;
    cr.bench_function("quad_singular_k", |b| {
        b.iter(|| {
            quad_singular(
                |x, _, to_b| c(1.0 / ((to_b * (1.0 + x)).sqrt() * (1.0 - k2 * x * x).sqrt()), 0.0),
                Endpoint::regular(0.0),
                Endpoint::singular(black_box(1.0), -0.5),
            )
        })
    });
}

fn residual(cr: &mut Criterion) {
    let (spec, cfg, pt) = (ratio(), problem(), seed_point());
    cr.bench_function("full_residual", |b| {
        b.iter(|| full_residual(black_box(0.0), &spec, &pt, &cfg, BranchChoice::default()))
    });
    let mut group = cr.benchmark_group("seed");
    group.sample_size(10);
    group.bench_function("seed_search", |b| {
        b.iter(|| seed_search(black_box(0.0), &spec, &cfg, &SeedGrid::default(), &SolverOptions::default()))
    });
    group.finish();
}

criterion_group!(benches, elliptic, quadrature, residual);
criterion_main!(benches);
